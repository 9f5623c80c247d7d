//! Truncated power series over exact rationals, and the generating functions
//! of the free and the visit-weighted walk expanded with them.
//!
//! The step-count variable is `lambda`; `V` marks visits to the site `Z`.
//! Everything is expressed through `alpha(lambda) = (1 - sqrt(1 - lambda^2)) / lambda`,
//! the small root of `lambda = 2 alpha / (1 + alpha^2)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{check_site, Result, WalkError};

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;

/// `sum_{n <= order} c_n lambda^n`, exact modulo `lambda^(order + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
}

fn int(v: i64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

impl RationalSeries {
    pub fn zero(order: usize) -> Self {
        RationalSeries {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn constant(order: usize, c: BigRational) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, BigRational::one())
    }

    /// `c lambda^degree`, or zero if `degree > order`.
    pub fn monomial(order: usize, degree: usize, c: BigRational) -> Self {
        let mut s = Self::zero(order);
        if degree <= order {
            s.coeffs[degree] = c;
        }
        s
    }

    /// The series `lambda`.
    pub fn lambda(order: usize) -> Self {
        Self::monomial(order, 1, BigRational::one())
    }

    /// Panics on an empty coefficient list.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        RationalSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `lambda^n`; zero above the truncation order.
    pub fn coeff(&self, n: usize) -> BigRational {
        self.coeffs.get(n).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<_> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, BigRational::zero());
        RationalSeries { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first non-zero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse; needs a non-zero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(WalkError::SeriesDomain("inverse of a series with zero constant term"));
        }
        let inv0 = a0.recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = BigRational::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() && !out[n - i].is_zero() {
                    acc += &self.coeffs[i] * &out[n - i];
                }
            }
            out.push(-(acc * &inv0));
        }
        Ok(RationalSeries { coeffs: out })
    }

    /// Square root with constant term 1; needs the input's constant term to
    /// be 1.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(WalkError::SeriesDomain("square root needs constant term 1"));
        }
        let two = int(2);
        let mut out: Vec<BigRational> = Vec::with_capacity(self.coeffs.len());
        out.push(BigRational::one());
        for n in 1..self.coeffs.len() {
            let mut acc = self.coeffs[n].clone();
            for i in 1..n {
                if !out[i].is_zero() && !out[n - i].is_zero() {
                    acc -= &out[i] * &out[n - i];
                }
            }
            out.push(acc / &two);
        }
        Ok(RationalSeries { coeffs: out })
    }

    /// Divides by `lambda`, losing one order of precision; needs a zero
    /// constant term.
    pub fn div_lambda(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(WalkError::SeriesDomain("division by lambda of a series with non-zero constant term"));
        }
        if self.coeffs.len() < 2 {
            return Err(WalkError::SeriesDomain("division by lambda leaves no coefficients"));
        }
        Ok(RationalSeries {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }
}

impl Add for &RationalSeries {
    type Output = RationalSeries;

    fn add(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        RationalSeries {
            coeffs: (0..=order).map(|n| &self.coeffs[n] + &rhs.coeffs[n]).collect(),
        }
    }
}

impl Sub for &RationalSeries {
    type Output = RationalSeries;

    fn sub(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        RationalSeries {
            coeffs: (0..=order).map(|n| &self.coeffs[n] - &rhs.coeffs[n]).collect(),
        }
    }
}

impl Neg for &RationalSeries {
    type Output = RationalSeries;

    fn neg(self) -> RationalSeries {
        RationalSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &RationalSeries {
    type Output = RationalSeries;

    fn mul(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.order().min(rhs.order());
        let mut out = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RationalSeries { coeffs: out }
    }
}

/// Truncated series in `lambda` whose coefficients are polynomials in `V`.
/// Both variables are truncated at the same order, which loses nothing for
/// walk generating functions since at most `N` visits fit in `N` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariateSeries {
    // rows[n][k] is the coefficient of lambda^n V^k.
    rows: Vec<Vec<BigRational>>,
}

impl BivariateSeries {
    pub fn zero(order: usize) -> Self {
        BivariateSeries {
            rows: vec![vec![BigRational::zero(); order + 1]; order + 1],
        }
    }

    /// A series with no `V` dependence.
    pub fn from_series(s: &RationalSeries) -> Self {
        Self::from_v_columns(s.order(), std::slice::from_ref(s))
    }

    /// `sum_k columns[k](lambda) V^k`.
    pub fn from_v_columns(order: usize, columns: &[RationalSeries]) -> Self {
        let mut out = Self::zero(order);
        for (k, col) in columns.iter().enumerate().take(order + 1) {
            for n in 0..=order {
                out.rows[n][k] = col.coeff(n);
            }
        }
        out
    }

    /// The monomial `V`.
    pub fn v(order: usize) -> Self {
        let mut out = Self::zero(order);
        if order >= 1 {
            out.rows[0][1] = BigRational::one();
        }
        out
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    /// Coefficient of `lambda^n V^k`; zero outside the truncation.
    pub fn coeff(&self, n: usize, k: usize) -> BigRational {
        self.rows
            .get(n)
            .and_then(|r| r.get(k))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Highest power of `V` with a non-zero coefficient at `lambda^n`.
    pub fn v_degree(&self, n: usize) -> Option<usize> {
        self.rows.get(n)?.iter().rposition(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    /// Evaluates at `V = 1`.
    pub fn at_v_one(&self) -> RationalSeries {
        RationalSeries::from_coeffs(
            self.rows
                .iter()
                .map(|r| r.iter().fold(BigRational::zero(), |a, c| a + c))
                .collect(),
        )
    }

    /// `lambda`-coefficient at degree `k` of `V`, as a series.
    pub fn v_column(&self, k: usize) -> RationalSeries {
        RationalSeries::from_coeffs(self.rows.iter().map(|r| r[k].clone()).collect())
    }

    /// Multiplicative inverse. The `lambda^0` polynomial must have a non-zero
    /// constant term so that it is a unit modulo `V^(order + 1)`.
    pub fn inverse(&self) -> Result<Self> {
        let order = self.order();
        let a0 = &self.rows[0];
        if a0[0].is_zero() {
            return Err(WalkError::SeriesDomain("inverse of a bivariate series with non-invertible leading polynomial"));
        }
        let inv0 = poly_inverse(a0);
        let mut out: Vec<Vec<BigRational>> = Vec::with_capacity(order + 1);
        out.push(inv0.clone());
        for n in 1..=order {
            let mut acc = vec![BigRational::zero(); order + 1];
            for i in 1..=n {
                poly_add_assign(&mut acc, &poly_mul(&self.rows[i], &out[n - i]));
            }
            let neg: Vec<BigRational> = acc.iter().map(|c| -c).collect();
            out.push(poly_mul(&neg, &inv0));
        }
        Ok(BivariateSeries { rows: out })
    }
}

fn poly_add_assign(acc: &mut [BigRational], p: &[BigRational]) {
    for (a, b) in acc.iter_mut().zip(p) {
        if !b.is_zero() {
            *a += b;
        }
    }
}

/// Product truncated to the length of `a`.
fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let cap = a.len();
    let mut out = vec![BigRational::zero(); cap];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(cap - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Inverse modulo `V^len`; needs a non-zero constant term.
fn poly_inverse(a: &[BigRational]) -> Vec<BigRational> {
    let inv0 = a[0].recip();
    let mut out = vec![inv0.clone()];
    for n in 1..a.len() {
        let mut acc = BigRational::zero();
        for i in 1..=n {
            if !a[i].is_zero() && !out[n - i].is_zero() {
                acc += &a[i] * &out[n - i];
            }
        }
        out.push(-(acc * &inv0));
    }
    out
}

impl Add for &BivariateSeries {
    type Output = BivariateSeries;

    fn add(self, rhs: &BivariateSeries) -> BivariateSeries {
        let order = self.order().min(rhs.order());
        BivariateSeries {
            rows: (0..=order)
                .map(|n| (0..=order).map(|k| &self.rows[n][k] + &rhs.rows[n][k]).collect())
                .collect(),
        }
    }
}

impl Sub for &BivariateSeries {
    type Output = BivariateSeries;

    fn sub(self, rhs: &BivariateSeries) -> BivariateSeries {
        let order = self.order().min(rhs.order());
        BivariateSeries {
            rows: (0..=order)
                .map(|n| (0..=order).map(|k| &self.rows[n][k] - &rhs.rows[n][k]).collect())
                .collect(),
        }
    }
}

impl Mul for &BivariateSeries {
    type Output = BivariateSeries;

    fn mul(self, rhs: &BivariateSeries) -> BivariateSeries {
        let order = self.order().min(rhs.order());
        let mut out = BivariateSeries::zero(order);
        for i in 0..=order {
            if self.rows[i].iter().all(Zero::is_zero) {
                continue;
            }
            let left = &self.rows[i][..=order];
            for j in 0..=order - i {
                let prod = poly_mul(left, &rhs.rows[j][..=order]);
                poly_add_assign(&mut out.rows[i + j], &prod);
            }
        }
        out
    }
}

impl Mul<&RationalSeries> for &BivariateSeries {
    type Output = BivariateSeries;

    fn mul(self, rhs: &RationalSeries) -> BivariateSeries {
        self * &BivariateSeries::from_series(&rhs.truncate(self.order()))
    }
}

/// `alpha(lambda) = (1 - sqrt(1 - lambda^2)) / lambda = lambda/2 + lambda^3/8 + ...`
pub fn alpha_series(order: usize) -> Result<RationalSeries> {
    if order < 1 {
        return Err(WalkError::InvalidTruncation { got: order, min: 1 });
    }
    let lam = RationalSeries::lambda(order + 1);
    let one = RationalSeries::one(order + 1);
    let root = (&one - &(&lam * &lam)).sqrt()?;
    (&one - &root).div_lambda()
}

/// `(1 + alpha^2) / (1 - alpha^2)`, the generating function of returns to the
/// origin.
fn origin_factor(alpha: &RationalSeries) -> Result<RationalSeries> {
    let order = alpha.order();
    let a2 = alpha * alpha;
    let one = RationalSeries::one(order);
    Ok(&(&one + &a2) * &(&one - &a2).inverse()?)
}

/// Free-walk generating function at `X`, `(1 + a^2)/(1 - a^2) a^|X|`; the
/// coefficient of `lambda^N` is `p_N(X)`.
pub fn free_gf_coeffs(order: usize, position: i64) -> Result<RationalSeries> {
    let alpha = alpha_series(order)?;
    let power = position.unsigned_abs() as u32;
    Ok(&origin_factor(&alpha)? * &alpha.pow(power))
}

/// Joint generating function at `X` for marked site `Z`:
///
/// `(1+a^2)/(1-a^2) (a^|X| - a^Z a^|X-Z|) + V a^Z a^|X-Z| (1+a^2)/(1+a^2-2a^2 V)`,
///
/// with the last factor expanded as `sum_j (2a^2/(1+a^2))^j V^j`. The
/// coefficient of `lambda^N V^K` is `P_N(X, K | Z)`.
pub fn joint_gf_coeffs(order: usize, position: i64, site: i64) -> Result<BivariateSeries> {
    check_site(site)?;
    let alpha = alpha_series(order)?;
    let one = RationalSeries::one(order);
    let a2 = &alpha * &alpha;
    let reach = (site + (position - site).abs()) as u32;
    let to_site = alpha.pow(reach);

    let no_visit = &origin_factor(&alpha)? * &(&alpha.pow(position.unsigned_abs() as u32) - &to_site);
    let ratio = &a2.scale(&int(2)) * &(&one + &a2).inverse()?;

    let mut columns = vec![no_visit];
    let mut term = to_site;
    while !term.is_zero() && columns.len() <= order {
        columns.push(term.clone());
        term = &term * &ratio;
    }
    Ok(BivariateSeries::from_v_columns(order, &columns))
}

/// The same joint generating function built by literally inverting
/// `1 + a^2 - 2 a^2 V` in the bivariate ring.
pub fn joint_gf_by_inversion(order: usize, position: i64, site: i64) -> Result<BivariateSeries> {
    check_site(site)?;
    let coeffs = RegionCoefficients::new(order, site)?;
    let alpha = alpha_series(order)?;
    let reach = (site + (position - site).abs()) as u32;
    let free = &origin_factor(&alpha)? * &(&alpha.pow(position.unsigned_abs() as u32) - &alpha.pow(reach));
    // `d` already carries the factor V.
    Ok(&BivariateSeries::from_series(&free) + &(&coeffs.d * &alpha.pow(reach)))
}

/// Amplitudes of the piecewise solution `A a^-X` (X <= 0), `B a^X + C a^-X`
/// (0 <= X <= Z), `D a^X` (X >= Z).
#[derive(Debug, Clone)]
pub struct RegionCoefficients {
    pub a: BivariateSeries,
    pub b: BivariateSeries,
    pub c: BivariateSeries,
    pub d: BivariateSeries,
}

impl RegionCoefficients {
    pub fn new(order: usize, site: i64) -> Result<Self> {
        check_site(site)?;
        let alpha = alpha_series(order)?;
        let one = RationalSeries::one(order);
        let a2 = &alpha * &alpha;
        let a2z = alpha.pow(2 * site as u32);
        let origin = origin_factor(&alpha)?;

        let v = BivariateSeries::v(order);
        let one_plus_a2 = BivariateSeries::from_series(&(&one + &a2));
        let denom = &one_plus_a2 - &(&v * &a2.scale(&int(2)));
        let d = &(&one_plus_a2 * &v) * &denom.inverse()?;

        let b = BivariateSeries::from_series(&origin);
        let c = &(&d * &a2z) - &(&b * &a2z);
        let a = &(&b * &(&one - &a2z)) + &(&d * &a2z);
        Ok(RegionCoefficients { a, b, c, d })
    }

    /// Residuals of the four matching conditions at `X = 0` and `X = Z`,
    /// each multiplied by a power of `alpha` so that no negative powers
    /// appear:
    ///
    /// - `A - (B + C)`
    /// - `D a^2Z - (B a^2Z + C)`
    /// - `A a - a - (lambda/2)(B a^2 + C + A a^2)`
    /// - `D a^(2Z-1) - (lambda V/2)(B a^(2Z-2) + C + D a^2Z)`
    pub fn residuals(&self, site: i64) -> Result<[BivariateSeries; 4]> {
        check_site(site)?;
        let order = self.a.order();
        let alpha = alpha_series(order)?;
        let a2 = &alpha * &alpha;
        let z = site as u32;
        let half_lambda = RationalSeries::lambda(order).scale(&BigRational::new(1.into(), 2.into()));
        let v = BivariateSeries::v(order);
        let alpha_b = BivariateSeries::from_series(&alpha);

        let r0 = &self.a - &(&self.b + &self.c);
        let r1 = &(&self.d * &alpha.pow(2 * z)) - &(&(&self.b * &alpha.pow(2 * z)) + &self.c);
        let origin_sum = &(&(&self.b * &a2) + &self.c) + &(&self.a * &a2);
        let r2 = &(&(&self.a * &alpha) - &alpha_b) - &(&origin_sum * &half_lambda);
        let site_sum = &(&(&self.b * &alpha.pow(2 * z - 2)) + &self.c) + &(&self.d * &alpha.pow(2 * z));
        let r3 = &(&self.d * &alpha.pow(2 * z - 1)) - &(&(&site_sum * &half_lambda) * &v);
        Ok([r0, r1, r2, r3])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactwalk::{joint_point, p_step, WalkQuery};
    use crate::oracle::dp_joint;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn series(cs: &[(i64, i64)]) -> RationalSeries {
        RationalSeries::from_coeffs(cs.iter().map(|&(p, q)| r(p, q)).collect())
    }

    #[test]
    fn alpha_low_orders() {
        assert_eq!(alpha_series(1).unwrap(), series(&[(0, 1), (1, 2)]));
        assert_eq!(
            alpha_series(3).unwrap(),
            series(&[(0, 1), (1, 2), (0, 1), (1, 8)])
        );
        assert_eq!(alpha_series(5).unwrap().coeff(5), r(1, 16));
        assert!(alpha_series(0).is_err());
    }

    #[test]
    fn alpha_inverts_the_step_relation() {
        for order in [1, 2, 7, 30] {
            let a = alpha_series(order).unwrap();
            let one = RationalSeries::one(order);
            let lhs = &a.scale(&int(2)) * &(&one + &(&a * &a)).inverse().unwrap();
            assert_eq!(lhs, RationalSeries::lambda(order));
        }
    }

    #[test]
    fn free_gf_examples() {
        let s = free_gf_coeffs(6, 0).unwrap();
        assert_eq!(
            s,
            series(&[(1, 1), (0, 1), (1, 2), (0, 1), (3, 8), (0, 1), (5, 16)])
        );
        assert_eq!(free_gf_coeffs(4, 1).unwrap().coeff(1), r(1, 2));
        assert_eq!(free_gf_coeffs(4, 3).unwrap().coeff(1), r(0, 1));
        for x in -12..=12 {
            let s = free_gf_coeffs(30, x).unwrap();
            for n in 0..=30 {
                assert_eq!(s.coeff(n), p_step(n as u32, x).to_rational(), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn joint_gf_examples() {
        let s = joint_gf_coeffs(8, 0, 1).unwrap();
        assert_eq!(s.coeff(0, 0), r(1, 1));
        assert_eq!(s.coeff(2, 1), r(1, 4));
        let s = joint_gf_coeffs(8, 1, 1).unwrap();
        let dp = dp_joint(5, 1).unwrap();
        assert_eq!(s.coeff(5, 2), dp.get(1, 2).to_rational());
        assert!(joint_gf_coeffs(8, 1, 0).is_err());
    }

    #[test]
    fn joint_gf_matches_closed_form() {
        let order = 20;
        for z in 1..=3 {
            for x in -4..=6 {
                let s = joint_gf_coeffs(order, x, z).unwrap();
                for n in 0..=order {
                    assert!(s.v_degree(n).unwrap_or(0) <= n);
                    for k in 0..=n {
                        let expect = if x.unsigned_abs() as usize <= n {
                            joint_point(&WalkQuery::new(n as u32, z, x, k as u32).unwrap())
                                .to_rational()
                        } else {
                            BigRational::zero()
                        };
                        assert_eq!(s.coeff(n, k), expect, "n={n} k={k} x={x} z={z}");
                    }
                }
            }
        }
    }

    #[test]
    fn v_one_collapses_to_free_walk() {
        for z in [1, 2, 4] {
            for x in [-3, 0, 1, z, z + 2] {
                let joint = joint_gf_coeffs(24, x, z).unwrap();
                assert_eq!(joint.at_v_one(), free_gf_coeffs(24, x).unwrap());
            }
        }
    }

    #[test]
    fn geometric_expansion_equals_bivariate_inverse() {
        for z in [1, 3] {
            for x in [-2, 0, 2, 5] {
                assert_eq!(
                    joint_gf_coeffs(12, x, z).unwrap(),
                    joint_gf_by_inversion(12, x, z).unwrap()
                );
            }
        }
    }

    #[test]
    fn region_amplitudes_solve_matching_conditions() {
        for z in 1..=3 {
            let rc = RegionCoefficients::new(12, z).unwrap();
            for (i, res) in rc.residuals(z).unwrap().iter().enumerate() {
                assert!(res.is_zero(), "condition {i} fails for z={z}");
            }
        }
    }

    #[test]
    fn misprinted_amplitude_breaks_matching() {
        // Replace 1 + a^2 - 2a^2 V by 1 + 2^Z - 2a^2 V in C and the
        // conditions no longer hold.
        let order = 10;
        let z = 2;
        let mut rc = RegionCoefficients::new(order, z).unwrap();
        let alpha = alpha_series(order).unwrap();
        let a2 = &alpha * &alpha;
        let a2z = alpha.pow(4);
        let v = BivariateSeries::v(order);
        let one = RationalSeries::one(order);
        let one_plus_a2 = BivariateSeries::from_series(&(&one + &a2));
        let bad_denom = &BivariateSeries::from_series(&RationalSeries::constant(order, int(5)))
            - &(&v * &a2.scale(&int(2)));
        let bad = &(&one_plus_a2 * &v) * &bad_denom.inverse().unwrap();
        rc.c = &(&bad * &a2z) - &(&rc.b * &a2z);
        let res = rc.residuals(z).unwrap();
        assert!(res.iter().any(|r| !r.is_zero()));
    }

    #[test]
    fn inverse_and_sqrt_domain_errors() {
        let s = series(&[(0, 1), (1, 1)]);
        assert!(s.inverse().is_err());
        assert!(s.sqrt().is_err());
        assert!(series(&[(1, 1)]).div_lambda().is_err());
    }

    proptest! {
        #[test]
        fn sqrt_squares_back(tail in proptest::collection::vec((-20i64..20, 1i64..9), 1..16)) {
            let mut cs = vec![(1, 1)];
            cs.extend(tail);
            let s = series(&cs);
            let root = s.sqrt().unwrap();
            prop_assert_eq!(&root * &root, s);
        }

        #[test]
        fn inverse_multiplies_to_one(c0 in 1i64..5, tail in proptest::collection::vec((-20i64..20, 1i64..9), 0..12)) {
            let mut cs = vec![(c0, 3)];
            cs.extend(tail);
            let s = series(&cs);
            let inv = s.inverse().unwrap();
            prop_assert_eq!(&s * &inv, RationalSeries::one(s.order()));
        }
    }
}
