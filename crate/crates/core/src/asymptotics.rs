//! Diffusion-scaling limit of the joint law.
//!
//! With `X = sqrt(N) x`, `K = sqrt(N) k` and `Z = sqrt(N) z`, the lattice law
//! converges to a density on `(x, k)` made of two parts:
//!
//! - an atom at `k = 0` with profile `phi(x) - phi(z + |x - z|)` (walks that
//!   never reached `z`),
//! - a continuous part `(k + c) phi(k + c)` with `c = z + |x - z|`,
//!
//! where `phi` is the standard normal density. Integrating out `x` leaves
//! `2 phi(k + z)` for `k > 0` plus an atom of weight `C(z) = erf(z / sqrt 2)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_bigint::BigUint;
use libm::erf;

use crate::dyadic::ratio_to_f64;
use crate::error::{Result, WalkError};
use crate::exactwalk::{binomial_row, max_visits};
use crate::quadrature::{integrate_from_neg_infinity, integrate_to_infinity};

/// Absolute tolerance for the adaptive quadrature in this module.
pub const QUADRATURE_TOL: f64 = 1e-10;

fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

fn check_scaled_site(z: f64) -> Result<()> {
    if z.is_finite() && z > 0.0 {
        Ok(())
    } else {
        Err(WalkError::InvalidScaledSite(z))
    }
}

/// Standard normal density, the limit of `(sqrt(N) / 2) p_N(x sqrt(N))`.
pub fn gaussian_x_density(x: f64) -> f64 {
    inv_sqrt_2pi() * (-0.5 * x * x).exp()
}

/// The limit law for a fixed scaled site `z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledJointDensity {
    site: f64,
}

impl ScaledJointDensity {
    pub fn new(site: f64) -> Result<Self> {
        check_scaled_site(site)?;
        Ok(ScaledJointDensity { site })
    }

    pub fn site(&self) -> f64 {
        self.site
    }

    /// `z + |x - z|`, the length of the shortest path from 0 to `x` through `z`.
    pub fn reach(&self, x: f64) -> f64 {
        self.site + (x - self.site).abs()
    }

    /// Density over `x` of the `k = 0` atom. Zero for `x >= z`.
    pub fn atom(&self, x: f64) -> f64 {
        if x >= self.site {
            return 0.0;
        }
        (gaussian_x_density(x) - gaussian_x_density(self.reach(x))).max(0.0)
    }

    /// Continuous density at `(x, k)`, `k >= 0`.
    pub fn continuous(&self, x: f64, k: f64) -> f64 {
        if k < 0.0 {
            return 0.0;
        }
        let y = k + self.reach(x);
        y * gaussian_x_density(y)
    }

    /// `(atom(x), continuous(x, k))`.
    pub fn evaluate(&self, x: f64, k: f64) -> (f64, f64) {
        (self.atom(x), self.continuous(x, k))
    }

    /// `k` maximising the continuous part at fixed `x`: `max(0, 1 - c)`.
    pub fn ridge(&self, x: f64) -> f64 {
        (1.0 - self.reach(x)).max(0.0)
    }
}

/// `(atom, continuous)` of the limit density at `(x, k)`.
pub fn scaled_joint(x: f64, k: f64, z: f64) -> Result<(f64, f64)> {
    Ok(ScaledJointDensity::new(z)?.evaluate(x, k))
}

/// Limit k-marginal at `k`: `(C(z), sqrt(2/pi) e^{-(k+z)^2/2})`, where the
/// atom weight `C(z)` comes from quadrature of the continuous part.
pub fn scaled_k_marginal(k: f64, z: f64) -> Result<(f64, f64)> {
    check_scaled_site(z)?;
    let density = if k < 0.0 { 0.0 } else { k_marginal_density(k, z) };
    Ok((no_visit_weight(z)?, density))
}

fn k_marginal_density(k: f64, z: f64) -> f64 {
    2.0 * gaussian_x_density(k + z)
}

/// `C(z) = 1 - int_0^inf sqrt(2/pi) e^{-(k+z)^2/2} dk` by quadrature.
pub fn no_visit_weight(z: f64) -> Result<f64> {
    check_scaled_site(z)?;
    Ok(1.0 - integrate_to_infinity(|k| k_marginal_density(k, z), 0.0, 1e-14))
}

/// Closed form of [`no_visit_weight`]: `erf(z / sqrt 2)`.
pub fn no_visit_weight_closed(z: f64) -> Result<f64> {
    check_scaled_site(z)?;
    Ok(erf(z * FRAC_1_SQRT_2))
}

fn integrate_line<F: Fn(f64) -> f64>(f: F, split: f64, tol: f64) -> f64 {
    integrate_from_neg_infinity(&f, split, tol) + integrate_to_infinity(&f, split, tol)
}

/// `int atom dx + int int continuous dk dx` by nested quadrature.
pub fn total_mass_by_quadrature(z: f64) -> Result<f64> {
    let d = ScaledJointDensity::new(z)?;
    let atom = integrate_from_neg_infinity(|x| d.atom(x), z, QUADRATURE_TOL);
    let cont = integrate_line(
        |x| integrate_to_infinity(|k| d.continuous(x, k), 0.0, QUADRATURE_TOL),
        z,
        QUADRATURE_TOL,
    );
    Ok(atom + cont)
}

/// `(int atom dx, int continuous(x, k) dx)`: the k-marginal rebuilt from
/// the joint density.
pub fn k_marginal_by_quadrature(k: f64, z: f64) -> Result<(f64, f64)> {
    let d = ScaledJointDensity::new(z)?;
    let atom = integrate_from_neg_infinity(|x| d.atom(x), z, QUADRATURE_TOL);
    let density = integrate_line(|x| d.continuous(x, k), z, QUADRATURE_TOL);
    Ok((atom, density))
}

/// Lattice geometry of the diffusion scaling at `N` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleMap {
    steps: u32,
    root: f64,
}

impl ScaleMap {
    pub fn new(steps: u32) -> Self {
        ScaleMap {
            steps,
            root: (steps as f64).sqrt(),
        }
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn to_scaled(&self, lattice: i64) -> f64 {
        lattice as f64 / self.root
    }

    pub fn to_scaled_visits(&self, visits: u32) -> f64 {
        visits as f64 / self.root
    }

    /// Spacing of reachable positions, `2 / sqrt(N)`.
    pub fn dx(&self) -> f64 {
        2.0 / self.root
    }

    /// Spacing of visit counts, `1 / sqrt(N)`.
    pub fn dk(&self) -> f64 {
        1.0 / self.root
    }

    /// Reachable position (`X = N mod 2`) nearest to `x sqrt(N)`.
    pub fn nearest_position(&self, x: f64) -> i64 {
        let n = self.steps as i64;
        // Positions are 2j - N for j in 0..=N.
        let j = ((x * self.root + n as f64) / 2.0).round() as i64;
        2 * j.clamp(0, n) - n
    }

    /// Lattice site nearest to `z sqrt(N)`, at least 1.
    pub fn site_for(&self, z: f64) -> i64 {
        ((z * self.root).round() as i64).max(1)
    }
}

/// Comparison between the exact lattice law and the limit density.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub steps: u32,
    pub site: i64,
    /// `Z / sqrt(N)`, the scaled site the limit is evaluated at.
    pub scaled_site: f64,
    /// Total variation distance over lattice cells.
    pub tv: f64,
    pub max_cell_error: f64,
    /// Exact `P(K = 0)`.
    pub exact_no_visit: f64,
    /// Limit atom weight `C(z)`.
    pub limit_no_visit: f64,
}

impl ConvergenceReport {
    /// How limit densities are turned into lattice masses.
    pub const RULE: &'static str = "cell (X,K>=1) gets continuous(X/sqrt N, K/sqrt N) * 2/N; \
         cell (X,0) gets atom(X/sqrt N) * 2/sqrt N; z = Z/sqrt N; \
         TV = 1/2 sum |exact - limit| over X = -N..N step 2, K = 0..K_max";
}

/// Total variation distance between the exact joint law at `(N, Z)` and the
/// lattice-aggregated limit density. Exact cells are computed with big
/// integers and rounded once to `f64`.
pub fn convergence_report(steps: u32, site: i64) -> Result<ConvergenceReport> {
    crate::error::check_site(site)?;
    if steps < 16 {
        return Err(WalkError::TooFewSteps(steps));
    }
    let scale = ScaleMap::new(steps);
    let z = scale.to_scaled(site);
    let limit = ScaledJointDensity::new(z)?;
    let n = steps as i64;
    let cont_cell = scale.dx() * scale.dk();

    let mut tv = 0.0;
    let mut max_err: f64 = 0.0;
    let mut exact_no_visit = 0.0;
    let mut record = |exact: f64, approx: f64| {
        let e = (exact - approx).abs();
        tv += e;
        max_err = max_err.max(e);
    };

    // K = 0 from row N.
    let row = binomial_row(steps);
    let count = |m: i64, y: i64| -> Option<usize> {
        let j = m + y;
        (y.abs() <= m && j % 2 == 0).then_some((j / 2) as usize)
    };
    for x in (-n..=n).step_by(2) {
        let exact = if x >= site {
            0.0
        } else {
            let hi = &row[count(n, x).unwrap()];
            let reflected = site + (x - site).abs();
            let diff = match count(n, reflected) {
                Some(j) => hi - &row[j],
                None => hi.clone(),
            };
            ratio_to_f64(&diff, steps as u64)
        };
        exact_no_visit += exact;
        record(exact, limit.atom(scale.to_scaled(x)) * scale.dx());
    }

    // K >= 1 from rows N-1, N-2, ... built downward with
    // C(m-1, j) = C(m, j) - C(m-1, j-1).
    let k_max = max_visits(steps, site);
    let mut row = row;
    for k in 1..=k_max.max(1) {
        let m = n - k as i64;
        if m < 0 {
            break;
        }
        let mut next = Vec::with_capacity(m as usize + 1);
        next.push(BigUint::from(1u32));
        for j in 1..=m as usize {
            let v = &row[j] - &next[j - 1];
            next.push(v);
        }
        row = next;
        let kk = scale.to_scaled_visits(k);
        for x in (-n..=n).step_by(2) {
            let a = site + (x - site).abs() + k as i64;
            let exact = match count(m, a - 2) {
                None => 0.0,
                Some(j_lo) => {
                    let lo = &row[j_lo];
                    let diff = match count(m, a) {
                        Some(j) => lo - &row[j],
                        None => lo.clone(),
                    };
                    ratio_to_f64(&diff, m as u64 + 1)
                }
            };
            record(exact, limit.continuous(scale.to_scaled(x), kk) * cont_cell);
        }
    }

    Ok(ConvergenceReport {
        steps,
        site,
        scaled_site: z,
        tv: 0.5 * tv,
        max_cell_error: max_err,
        exact_no_visit,
        limit_no_visit: no_visit_weight_closed(z)?,
    })
}

/// Point on the ridge of the limit density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgePoint {
    pub x: f64,
    /// `k` maximising the continuous part at this `x`.
    pub k_star: f64,
    pub max_density: f64,
    /// Atom profile at this `x`, for comparison.
    pub atom: f64,
}

/// Evenly spaced grid axis `min..=max` with `steps` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || steps < 2 || max <= min {
            return Err(WalkError::InvalidGrid(format!(
                "need finite min < max and at least 2 points, got {min}:{max}:{steps}"
            )));
        }
        Ok(GridAxis { min, max, steps })
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(move |i| {
            if i + 1 == self.steps {
                self.max
            } else {
                self.min + h * i as f64
            }
        })
    }
}

/// Maximum of the continuous part over `k` for each `x` on the axis.
pub fn density_maxima_grid(z: f64, axis: &GridAxis) -> Result<Vec<RidgePoint>> {
    let d = ScaledJointDensity::new(z)?;
    Ok(axis
        .points()
        .map(|x| {
            let k_star = d.ridge(x);
            RidgePoint {
                x,
                k_star,
                max_density: d.continuous(x, k_star),
                atom: d.atom(x),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactwalk::{no_visit_probability, p_step};

    #[test]
    fn gaussian_values() {
        assert!((gaussian_x_density(0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert_eq!(gaussian_x_density(1e3), 0.0);
        let total = integrate_line(gaussian_x_density, 0.0, 1e-13);
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_is_limit_of_free_walk() {
        let scale = ScaleMap::new(4096);
        for x in [-2.0, -0.5, 0.0, 0.3, 1.0, 2.5] {
            let lattice = scale.nearest_position(x);
            let scaled = 32.0 * p_step(4096, lattice).to_f64();
            let err = (scaled - gaussian_x_density(scale.to_scaled(lattice))).abs();
            assert!(err < 0.01, "x={x} err={err}");
        }
    }

    #[test]
    fn joint_density_examples() {
        let (atom, cont) = scaled_joint(1.0, 0.0, 1.0).unwrap();
        assert_eq!(atom, 0.0);
        let expected = (-0.5f64).exp() / (2.0 * PI).sqrt();
        assert!((cont - expected).abs() < 1e-15);
        assert!((cont - 0.241_970_724_519_143_37).abs() < 1e-12);
        for z in [0.3, 1.0, 2.0] {
            for x in [z, z + 0.1, z + 3.0] {
                assert_eq!(scaled_joint(x, 0.7, z).unwrap().0, 0.0);
            }
        }
        assert!(scaled_joint(0.0, 0.0, 0.0).is_err());
        assert!(scaled_joint(0.0, 0.0, -1.0).is_err());
        assert!(scaled_joint(0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn joint_density_is_non_negative() {
        let d = ScaledJointDensity::new(0.8).unwrap();
        for i in -60..=60 {
            let x = i as f64 * 0.1;
            assert!(d.atom(x) >= 0.0);
            for j in 0..40 {
                assert!(d.continuous(x, j as f64 * 0.1) >= 0.0);
            }
        }
    }

    #[test]
    fn continuous_part_matches_scaled_exact_law() {
        // (N/2) P_N(X, K | Z) near x = z = 1, k small, at N = 4096.
        let n = 4096u32;
        let (z_site, x_site, k) = (64i64, 64i64, 4u32);
        let q = crate::exactwalk::WalkQuery::new(n, z_site, x_site, k).unwrap();
        let exact = crate::exactwalk::joint_point(&q).to_f64() * n as f64 / 2.0;
        let limit = ScaledJointDensity::new(1.0).unwrap().continuous(1.0, k as f64 / 64.0);
        assert!((exact - limit).abs() < 0.01, "exact={exact} limit={limit}");
    }

    #[test]
    fn total_mass_is_one() {
        for z in [0.25, 0.5, 1.0, 2.0] {
            let m = total_mass_by_quadrature(z).unwrap();
            assert!((m - 1.0).abs() < 1e-8, "z={z} mass={m}");
        }
    }

    #[test]
    fn normalization_constant() {
        let c = no_visit_weight(0.5).unwrap();
        assert!((c - 0.3829).abs() < 1e-4);
        for z in [0.1, 0.5, 1.0, 2.0, 4.0] {
            let q = no_visit_weight(z).unwrap();
            let e = no_visit_weight_closed(z).unwrap();
            assert!((q - e).abs() < 1e-10, "z={z} quad={q} erf={e}");
        }
        assert!((no_visit_weight(40.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_constant_matches_reference_erf() {
        // erf(z / sqrt 2) from an independent libm.
        let reference = [
            (0.1, 0.079_655_674_554_057_96),
            (0.5, 0.382_924_922_548_026_2),
            (1.0, 0.682_689_492_137_085_9),
            (2.0, 0.954_499_736_103_641_6),
            (4.0, 0.999_936_657_516_333_8),
        ];
        for (z, want) in reference {
            let got = no_visit_weight_closed(z).unwrap();
            assert!((got - want).abs() <= 4.0 * f64::EPSILON, "z={z}: {got} vs {want}");
        }
    }

    #[test]
    fn k_marginal_is_integral_of_joint() {
        for z in [0.5, 1.0] {
            for k in [0.0, 0.2, 1.0, 2.5] {
                let (c, dens) = scaled_k_marginal(k, z).unwrap();
                let (qc, qd) = k_marginal_by_quadrature(k, z).unwrap();
                assert!((c - qc).abs() < 1e-6, "atom z={z}");
                assert!((dens - qd).abs() < 1e-6, "density z={z} k={k}");
            }
        }
    }

    #[test]
    fn no_visit_weight_matches_exact_probability() {
        let scale = ScaleMap::new(4096);
        for z in [0.5, 1.0] {
            let site = scale.site_for(z);
            let exact = no_visit_probability(4096, site).unwrap().to_f64();
            let c = no_visit_weight_closed(z).unwrap();
            assert!((exact - c).abs() <= 0.02, "z={z} exact={exact} c={c}");
        }
    }

    #[test]
    fn ridge_examples() {
        let d = ScaledJointDensity::new(0.5).unwrap();
        assert!((d.ridge(0.5) - 0.5).abs() < 1e-15);
        let d = ScaledJointDensity::new(1.2).unwrap();
        assert_eq!(d.ridge(0.0), 0.0);

        // Grid-search oracle for the argmax.
        for z in [0.3, 0.5, 1.0] {
            let d = ScaledJointDensity::new(z).unwrap();
            for x in [-1.0, 0.0, 0.2, z, z + 0.3, 2.0] {
                let (mut best_k, mut best) = (0.0, f64::MIN);
                for i in 0..=40_000 {
                    let k = i as f64 * 1e-4;
                    let v = d.continuous(x, k);
                    if v > best {
                        best = v;
                        best_k = k;
                    }
                }
                assert!((best_k - d.ridge(x)).abs() <= 1e-4, "z={z} x={x}");
            }
        }
    }

    #[test]
    fn grid_depends_on_x_only_through_reach() {
        let axis = GridAxis::new(-2.0, 3.0, 51).unwrap();
        let grid = density_maxima_grid(0.5, &axis).unwrap();
        assert_eq!(grid.len(), 51);
        let d = ScaledJointDensity::new(0.5).unwrap();
        for p in &grid {
            // Mirror image about z has the same reach.
            let mirror = 2.0 * 0.5 - p.x;
            assert!((d.continuous(mirror, p.k_star) - p.max_density).abs() < 1e-15);
        }
        assert!(GridAxis::new(0.0, 1.0, 1).is_err());
        assert!(GridAxis::new(1.0, 0.0, 5).is_err());
        assert!(density_maxima_grid(-1.0, &axis).is_err());
    }

    #[test]
    fn scale_map_respects_parity() {
        for n in [16u32, 17, 100, 101] {
            let s = ScaleMap::new(n);
            for x in [-3.0, -0.1, 0.0, 0.77, 5.0] {
                let lattice = s.nearest_position(x);
                assert_eq!((n as i64 - lattice).rem_euclid(2), 0);
                assert!(lattice.unsigned_abs() <= n as u64);
            }
        }
        assert_eq!(ScaleMap::new(4096).site_for(1.0), 64);
        assert_eq!(ScaleMap::new(4096).site_for(0.001), 1);
    }

    #[test]
    fn convergence_improves_with_n() {
        let tvs: Vec<f64> = [256u32, 1024]
            .iter()
            .map(|&n| convergence_report(n, ScaleMap::new(n).site_for(1.0)).unwrap().tv)
            .collect();
        assert!(tvs[0] > tvs[1], "{tvs:?}");
        assert!(convergence_report(8, 1).is_err());
        assert!(convergence_report(64, 0).is_err());
    }
}
