//! Closed-form exact law of the walk: free-walk probabilities, the joint law
//! of (position, visits to the marked site), marginals, cumulant and moments.
//!
//! The visit count `K` counts arrivals at `Z` during steps `1..=N`; the
//! starting point is never counted. Only sites `Z >= 1` are supported. A walk
//! marked at a negative site is the mirror image of one marked at `-Z`, so
//! callers can evaluate `(X, Z) -> (-X, -Z)` instead.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::DyadicProb;
use crate::error::{check_site, Result, WalkError};

/// A point `(N, Z, X, K)` of the joint law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WalkQuery {
    steps: u32,
    site: i64,
    position: i64,
    visits: u32,
}

impl WalkQuery {
    /// Requires `Z >= 1`, `|X| <= N` and `K <= N`. Parity is not checked:
    /// off-parity points are legal and have probability zero.
    pub fn new(steps: u32, site: i64, position: i64, visits: u32) -> Result<Self> {
        check_site(site)?;
        if position.unsigned_abs() > steps as u64 || visits > steps {
            return Err(WalkError::QueryOutOfRange {
                n: steps,
                x: position,
                k: visits,
            });
        }
        Ok(WalkQuery {
            steps,
            site,
            position,
            visits,
        })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn site(&self) -> i64 {
        self.site
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    pub fn visits(&self) -> u32 {
        self.visits
    }
}

/// True if a walk of `steps` steps can end at `position`.
pub fn on_lattice(steps: u32, position: i64) -> bool {
    position.unsigned_abs() <= steps as u64 && (steps as i64 - position).rem_euclid(2) == 0
}

/// Free-walk probability `p_N(X) = C(N, (N+X)/2) / 2^N`, zero off the
/// support or off parity.
pub fn p_step(steps: u32, position: i64) -> DyadicProb {
    if !on_lattice(steps, position) {
        return DyadicProb::zero();
    }
    let up = ((steps as i64 + position) / 2) as u64;
    DyadicProb::from_count(
        binomial(BigUint::from(steps), BigUint::from(up)),
        steps as u64,
    )
}

/// Row `C(n, 0..=n)` of Pascal's triangle.
pub(crate) fn binomial_row(n: u32) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for j in 0..n {
        c = c * (n - j) / (j + 1);
        row.push(c.clone());
    }
    row
}

/// Cumulative free-walk distribution `F_N(X) = sum_{Y <= X} p_N(Y)`.
pub fn cumulant_f(steps: u32, position: i64) -> DyadicProb {
    if position < -(steps as i64) {
        return DyadicProb::zero();
    }
    if position >= steps as i64 {
        return DyadicProb::one();
    }
    // Y = 2j - N <= X  <=>  j <= (X + N) / 2.
    let last = (position + steps as i64).div_euclid(2) as usize;
    let count: BigUint = binomial_row(steps).into_iter().take(last + 1).sum();
    DyadicProb::from_count(count, steps as u64)
}

/// The joint probability `P_N(X, K | Z)`.
///
/// For `K = 0`: `p_N(X) - p_N(Z + |X - Z|)`.
/// For `K >= 1`: `(p_{N-K}(d + Z + K - 2) - p_{N-K}(d + Z + K)) / 2` with
/// `d = |X - Z|`.
pub fn joint_point(q: &WalkQuery) -> DyadicProb {
    let n = q.steps;
    let z = q.site;
    let x = q.position;
    let k = q.visits;
    let reflected = z + (x - z).abs();
    let (plus, minus) = if k == 0 {
        (p_step(n, x), p_step(n, reflected))
    } else {
        let m = n - k;
        let a = reflected + k as i64;
        (p_step(m, a - 2), p_step(m, a))
    };
    let diff = plus
        .checked_sub(&minus)
        .expect("closed-form joint probability is non-negative");
    if k == 0 {
        diff
    } else {
        diff.half()
    }
}

/// Largest visit count with positive probability.
pub fn max_visits(steps: u32, site: i64) -> u32 {
    if (steps as i64) < site {
        0
    } else {
        ((steps as i64 - site + 2) / 2) as u32
    }
}

/// Exact joint distribution over `(X, K)` for fixed `(N, Z)`, stored sparsely
/// (only cells of positive probability) in lexicographic `(X, K)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    steps: u32,
    site: i64,
    entries: BTreeMap<(i64, u32), DyadicProb>,
}

impl JointTable {
    /// Builds a table, dropping zero cells.
    pub fn from_entries(
        steps: u32,
        site: i64,
        entries: impl IntoIterator<Item = ((i64, u32), DyadicProb)>,
    ) -> Self {
        JointTable {
            steps,
            site,
            entries: entries.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        }
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn site(&self) -> i64 {
        self.site
    }

    pub fn get(&self, position: i64, visits: u32) -> DyadicProb {
        self.entries
            .get(&(position, visits))
            .cloned()
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, u32, &DyadicProb)> {
        self.entries.iter().map(|(&(x, k), p)| (x, k, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> DyadicProb {
        self.entries.values().sum()
    }

    /// Row sums `sum_K P(X, K)`.
    pub fn x_marginal(&self) -> SiteDist {
        let mut values: BTreeMap<i64, DyadicProb> = BTreeMap::new();
        for (x, _, p) in self.iter() {
            let slot = values.entry(x).or_default();
            *slot = &*slot + p;
        }
        SiteDist {
            steps: self.steps,
            values,
        }
    }

    /// Column sums `sum_X P(X, K)`.
    pub fn k_marginal(&self) -> VisitDist {
        let mut values: BTreeMap<u32, DyadicProb> = BTreeMap::new();
        for (_, k, p) in self.iter() {
            let slot = values.entry(k).or_default();
            *slot = &*slot + p;
        }
        VisitDist {
            steps: self.steps,
            site: self.site,
            values,
        }
    }

    /// `E[X^order]` summed over the joint cells.
    pub fn moment_x(&self, order: u32) -> BigRational {
        self.iter()
            .map(|(x, _, p)| p.to_rational() * BigRational::from(BigInt::from(x).pow(order)))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// `E[K^order]` summed over the joint cells.
    pub fn moment_k(&self, order: u32) -> BigRational {
        self.iter()
            .map(|(_, k, p)| p.to_rational() * BigRational::from(BigInt::from(k).pow(order)))
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Distribution of the position `X` after `N` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteDist {
    steps: u32,
    values: BTreeMap<i64, DyadicProb>,
}

impl SiteDist {
    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn get(&self, position: i64) -> DyadicProb {
        self.values.get(&position).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &DyadicProb)> {
        self.values.iter().map(|(&x, p)| (x, p))
    }

    pub fn total(&self) -> DyadicProb {
        self.values.values().sum()
    }
}

/// Distribution of the visit count `K` after `N` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitDist {
    steps: u32,
    site: i64,
    values: BTreeMap<u32, DyadicProb>,
}

impl VisitDist {
    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn site(&self) -> i64 {
        self.site
    }

    pub fn get(&self, visits: u32) -> DyadicProb {
        self.values.get(&visits).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &DyadicProb)> {
        self.values.iter().map(|(&k, p)| (k, p))
    }

    pub fn total(&self) -> DyadicProb {
        self.values.values().sum()
    }

    pub fn moment(&self, order: u32) -> BigRational {
        self.iter()
            .map(|(k, p)| p.to_rational() * BigRational::from(BigInt::from(k).pow(order)))
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Full joint table from an arbitrary point evaluator. The verification
/// suite uses this to run the same checks against altered formulas.
pub fn joint_table_with<F>(steps: u32, site: i64, point: F) -> Result<JointTable>
where
    F: Fn(&WalkQuery) -> DyadicProb,
{
    check_site(site)?;
    let mut entries = Vec::new();
    for x in (-(steps as i64)..=steps as i64).step_by(2) {
        for k in 0..=steps {
            let q = WalkQuery::new(steps, site, x, k)?;
            entries.push(((x, k), point(&q)));
        }
    }
    Ok(JointTable::from_entries(steps, site, entries))
}

/// The exact joint table `P_N(X, K | Z)` from the closed form.
pub fn joint_table(steps: u32, site: i64) -> Result<JointTable> {
    check_site(site)?;
    // Cells with K above the support bound are identically zero.
    let k_max = max_visits(steps, site);
    let mut entries = Vec::new();
    for x in (-(steps as i64)..=steps as i64).step_by(2) {
        for k in 0..=k_max {
            let q = WalkQuery::new(steps, site, x, k)?;
            entries.push(((x, k), joint_point(&q)));
        }
    }
    Ok(JointTable::from_entries(steps, site, entries))
}

/// Position marginal. Knowing `Z` says nothing about `X` alone, so this is
/// the free-walk row `p_N(.)`.
pub fn marginal_x(steps: u32, site: i64) -> Result<SiteDist> {
    check_site(site)?;
    let row = binomial_row(steps);
    let values = row
        .into_iter()
        .enumerate()
        .map(|(j, c)| (2 * j as i64 - steps as i64, DyadicProb::from_count(c, steps as u64)))
        .collect();
    Ok(SiteDist { steps, values })
}

/// Probability that the walk never reaches `Z` in `N` steps,
/// `F_N(Z-1) - F_N(-Z-1)`: by reflection at `Z`, the walks ending below `Z`
/// that did touch `Z` are in bijection with the walks ending above `Z`.
pub fn no_visit_probability(steps: u32, site: i64) -> Result<DyadicProb> {
    check_site(site)?;
    Ok(cumulant_f(steps, site - 1)
        .checked_sub(&cumulant_f(steps, -site - 1))
        .expect("cumulant is monotone"))
}

/// Visit-count marginal from the parity-split closed form:
/// `P(K=0)` from [`no_visit_probability`] and, for `K >= 1`,
/// `C(N-K, (N+Z-1)/2) / 2^(N-K)` when `N - Z` is odd,
/// `C(N+1-K, (N+Z)/2) / 2^(N+1-K)` when `N - Z` is even.
pub fn marginal_k(steps: u32, site: i64) -> Result<VisitDist> {
    check_site(site)?;
    let n = steps as i64;
    let mut values = BTreeMap::new();
    values.insert(0, no_visit_probability(steps, site)?);
    for k in 1..=steps {
        let (row, choose) = if (n - site).rem_euclid(2) == 1 {
            (n - k as i64, (n + site - 1) / 2)
        } else {
            (n + 1 - k as i64, (n + site) / 2)
        };
        if choose > row {
            // Binomial vanishes here and for every larger K.
            break;
        }
        let c = binomial(BigUint::from(row as u64), BigUint::from(choose as u64));
        values.insert(k, DyadicProb::from_count(c, row as u64));
    }
    values.retain(|_, p| !p.is_zero());
    Ok(VisitDist {
        steps,
        site,
        values,
    })
}

/// `P(K = k)` for `k >= 1` in the unsplit form
/// `(p_m(Z+K-2) + 2 p_m(Z+K-1) + p_m(Z+K)) / 2` with `m = N - K`, i.e. the
/// sum over `X` of the `K >= 1` branch of the joint law before parity is
/// used to collapse it.
pub fn visit_mass_unsplit(steps: u32, site: i64, visits: u32) -> Result<DyadicProb> {
    check_site(site)?;
    if visits == 0 || visits > steps {
        return Err(WalkError::QueryOutOfRange {
            n: steps,
            x: 0,
            k: visits,
        });
    }
    let m = steps - visits;
    let c = site + visits as i64;
    let mid = p_step(m, c - 1);
    let sum = &(&p_step(m, c - 2) + &mid) + &(&mid + &p_step(m, c));
    Ok(sum.half())
}

/// `(E[X], E[X^2])` by exact summation over the position marginal.
pub fn moments_x(steps: u32, site: i64) -> Result<(BigRational, BigRational)> {
    let dist = marginal_x(steps, site)?;
    let mut mean = BigRational::zero();
    let mut second = BigRational::zero();
    for (x, p) in dist.iter() {
        let p = p.to_rational();
        let xr = BigRational::from(BigInt::from(x));
        mean += &p * &xr;
        second += p * &xr * &xr;
    }
    Ok((mean, second))
}

/// `E[K^order]` for `order` 1 or 2, by exact summation over the visit
/// marginal.
pub fn moments_k(steps: u32, site: i64, order: u32) -> Result<BigRational> {
    if !(1..=2).contains(&order) {
        return Err(WalkError::InvalidMomentOrder(order));
    }
    Ok(marginal_k(steps, site)?.moment(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> DyadicProb {
        s.parse().unwrap()
    }

    fn q(n: u32, z: i64, x: i64, k: u32) -> WalkQuery {
        WalkQuery::new(n, z, x, k).unwrap()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn p_step_examples() {
        assert_eq!(p_step(0, 0), DyadicProb::one());
        assert_eq!(p_step(2, 0), d("1/2^1"));
        assert_eq!(p_step(3, 0), DyadicProb::zero());
        assert_eq!(p_step(4, 2), d("1/2^2"));
        assert_eq!(p_step(4, 6), DyadicProb::zero());
    }

    #[test]
    fn cumulant_examples() {
        assert_eq!(cumulant_f(2, 0), d("3/2^2"));
        assert_eq!(cumulant_f(5, 5), DyadicProb::one());
        assert_eq!(cumulant_f(5, -6), DyadicProb::zero());
        // Off-parity argument rounds down to the lattice point below.
        assert_eq!(cumulant_f(2, -1), d("1/2^2"));
        assert_eq!(cumulant_f(2, 1), d("3/2^2"));
    }

    #[test]
    fn joint_point_examples() {
        assert_eq!(joint_point(&q(1, 1, 1, 1)), d("1/2^1"));
        assert_eq!(joint_point(&q(2, 1, 0, 0)), d("1/2^2"));
        assert_eq!(joint_point(&q(2, 1, 0, 1)), d("1/2^2"));
        assert_eq!(joint_point(&q(2, 1, 2, 1)), d("1/2^2"));
        assert_eq!(joint_point(&q(4, 2, 0, 2)), DyadicProb::zero());
        // Off parity.
        assert_eq!(joint_point(&q(3, 1, 0, 1)), DyadicProb::zero());
    }

    #[test]
    fn query_rejects_bad_input() {
        assert_eq!(
            WalkQuery::new(2, 0, 0, 0).unwrap_err(),
            WalkError::InvalidSite(0)
        );
        assert!(WalkQuery::new(2, -1, 0, 0).is_err());
        assert!(WalkQuery::new(2, 1, 3, 0).is_err());
        assert!(WalkQuery::new(2, 1, 0, 3).is_err());
        assert!(joint_table(4, 0).is_err());
        assert!(marginal_x(4, -2).is_err());
        assert!(marginal_k(4, 0).is_err());
        assert!(moments_k(4, 1, 3).is_err());
    }

    #[test]
    fn joint_table_examples() {
        let t = joint_table(0, 1).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(0, 0), DyadicProb::one());

        let t = joint_table(2, 1).unwrap();
        let cells: Vec<(i64, u32, String)> =
            t.iter().map(|(x, k, p)| (x, k, p.to_string())).collect();
        assert_eq!(
            cells,
            vec![
                (-2, 0, "1/2^2".to_string()),
                (0, 0, "1/2^2".to_string()),
                (0, 1, "1/2^2".to_string()),
                (2, 1, "1/2^2".to_string()),
            ]
        );
    }

    #[test]
    fn marginal_examples() {
        let mx = marginal_x(2, 1).unwrap();
        assert_eq!(mx.get(-2), d("1/2^2"));
        assert_eq!(mx.get(0), d("1/2^1"));
        assert_eq!(mx.get(2), d("1/2^2"));
        assert_eq!(marginal_x(0, 5).unwrap().get(0), DyadicProb::one());
        let mx = marginal_x(10, 3).unwrap();
        for x in -10..=10 {
            assert_eq!(mx.get(x), p_step(10, x));
        }

        let mk = marginal_k(2, 1).unwrap();
        assert_eq!(mk.get(0), d("1/2^1"));
        assert_eq!(mk.get(1), d("1/2^1"));
        assert_eq!(mk.iter().count(), 2);

        let mk = marginal_k(3, 5).unwrap();
        assert_eq!(mk.iter().count(), 1);
        assert_eq!(mk.get(0), DyadicProb::one());
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moments_x(2, 1).unwrap(), (rat(0, 1), rat(2, 1)));
        assert_eq!(moments_x(0, 1).unwrap(), (rat(0, 1), rat(0, 1)));
        assert_eq!(moments_x(7, 2).unwrap(), (rat(0, 1), rat(7, 1)));
        assert_eq!(moments_k(2, 1, 1).unwrap(), rat(1, 2));
        assert_eq!(moments_k(1, 2, 1).unwrap(), rat(0, 1));
        let t = joint_table(20, 4).unwrap();
        assert_eq!(moments_k(20, 4, 2).unwrap(), t.moment_k(2));
    }

    #[test]
    fn support_bound_is_tight() {
        for z in 1..=5 {
            for n in 0..=24u32 {
                let t = joint_table(n, z).unwrap();
                let top = t.iter().map(|(_, k, _)| k).max().unwrap();
                assert_eq!(top, max_visits(n, z), "n={n} z={z}");
            }
        }
    }

    #[test]
    fn no_visit_is_not_the_plain_cumulant() {
        // F_2(0) = 3/4 counts the path (+1, 0), which does visit Z = 1.
        assert_eq!(cumulant_f(2, 0), d("3/2^2"));
        assert_eq!(no_visit_probability(2, 1).unwrap(), d("1/2^1"));
        assert_eq!(no_visit_probability(3, 5).unwrap(), DyadicProb::one());
    }

    #[test]
    fn no_visit_mass_grows_with_site() {
        for n in [0u32, 1, 7, 20, 33] {
            let mut prev = DyadicProb::zero();
            for z in 1..=n as i64 + 2 {
                let p0 = marginal_k(n, z).unwrap().get(0);
                assert!(p0 >= prev);
                prev = p0;
            }
        }
    }

    proptest! {
        #[test]
        fn table_is_normalized_with_consistent_marginals(n in 0u32..40, z in 1i64..9) {
            let t = joint_table(n, z).unwrap();
            prop_assert_eq!(t.total(), DyadicProb::one());
            prop_assert_eq!(t.x_marginal(), marginal_x(n, z).unwrap());
            prop_assert_eq!(t.k_marginal(), marginal_k(n, z).unwrap());
            for (_, _, p) in t.iter() {
                prop_assert!(p.is_probability());
            }
        }

        #[test]
        fn reflection_symmetry(n in 0u32..80, x in 0i64..80) {
            prop_assert_eq!(p_step(n, x), p_step(n, -x));
        }

        #[test]
        fn unsplit_visit_mass_matches_parity_form(n in 1u32..50, z in 1i64..9, k in 1u32..50) {
            prop_assume!(k <= n);
            let closed = marginal_k(n, z).unwrap().get(k);
            prop_assert_eq!(visit_mass_unsplit(n, z, k).unwrap(), closed);
        }

        #[test]
        fn x_moments_from_joint(n in 0u32..40, z in 1i64..7) {
            let t = joint_table(n, z).unwrap();
            prop_assert_eq!(t.moment_x(1), BigRational::zero());
            prop_assert_eq!(t.moment_x(2), BigRational::from(BigInt::from(n)));
        }
    }
}
