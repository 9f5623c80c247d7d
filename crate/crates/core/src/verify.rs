//! Cross-module equivalence suite: closed form against the DP and
//! enumeration oracles, marginal and moment identities, generating-function
//! coefficients, and convergence of the diffusion limit.
//!
//! The closed form is passed in as a point evaluator so the suite can be run
//! against a deliberately broken formula to confirm that it notices.

use std::fmt;
use std::thread;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::asymptotics::{convergence_report, ScaleMap};
use crate::dyadic::DyadicProb;
use crate::exactwalk::{
    joint_table_with, marginal_k, marginal_x, p_step, JointTable, WalkQuery,
};
use crate::oracle::{dp_joint, enumerate_joint};
use crate::powerseries::{free_gf_coeffs, joint_gf_coeffs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    /// `N <= 16`, generating functions to order 24.
    Quick,
    /// `N <= 64`, generating functions to order 48, convergence of the limit.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{mark}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub depth: Depth,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Closed form with the sign of the `K >= 1` branch flipped, i.e.
/// `(p(a-2) + p(a)) / 2`. Only useful for checking that the suite fails.
pub fn flipped_sign_point(q: &WalkQuery) -> DyadicProb {
    if q.visits() == 0 {
        return crate::exactwalk::joint_point(q);
    }
    let m = q.steps() - q.visits();
    let a = q.site() + (q.position() - q.site()).abs() + q.visits() as i64;
    (&p_step(m, a - 2) + &p_step(m, a)).half()
}

fn outcome(name: &str, failures: Vec<String>, checked: usize) -> CheckOutcome {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{checked} cases agree")
    } else {
        format!(
            "{} of {checked} cases disagree; first: {}",
            failures.len(),
            failures[0]
        )
    };
    CheckOutcome {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Runs `task` for every site on up to `threads` threads, collecting failure
/// messages in site order.
fn per_site<T>(sites: &[i64], threads: usize, task: T) -> Vec<String>
where
    T: Fn(i64) -> Vec<String> + Sync,
{
    let threads = threads.max(1);
    let chunks: Vec<&[i64]> = sites.chunks(sites.len().div_ceil(threads).max(1)).collect();
    thread::scope(|s| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                let task = &task;
                s.spawn(move || chunk.iter().flat_map(|&z| task(z)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("verify worker panicked")).collect()
    })
}

fn first_difference(a: &JointTable, b: &JointTable) -> Option<String> {
    let mut cells: Vec<(i64, u32)> = a.iter().map(|(x, k, _)| (x, k)).collect();
    cells.extend(b.iter().map(|(x, k, _)| (x, k)));
    cells.sort_unstable();
    cells.dedup();
    cells.into_iter().find_map(|(x, k)| {
        let (pa, pb) = (a.get(x, k), b.get(x, k));
        (pa != pb).then(|| format!("cell (X={x}, K={k}): {pa} vs {pb}"))
    })
}

/// Enumeration, DP and the closed form agree cell by cell for `N <= max_n`.
pub fn check_triple_agreement<P>(max_n: u32, sites: &[i64], threads: usize, point: &P) -> CheckOutcome
where
    P: Fn(&WalkQuery) -> DyadicProb + Sync,
{
    let failures = per_site(sites, threads, |z| {
        let mut bad = Vec::new();
        for n in 0..=max_n {
            let closed = joint_table_with(n, z, point).expect("valid site");
            let dp = dp_joint(n, z).expect("valid site");
            let en = enumerate_joint(n, z).expect("within enumeration cap");
            if let Some(d) = first_difference(&en, &dp) {
                bad.push(format!("N={n} Z={z} enumeration vs DP, {d}"));
            }
            if let Some(d) = first_difference(&dp, &closed) {
                bad.push(format!("N={n} Z={z} DP vs closed form, {d}"));
            }
        }
        bad
    });
    outcome(
        &format!("enumeration = DP = closed form (N <= {max_n}, Z in {sites:?})"),
        failures,
        (max_n as usize + 1) * sites.len(),
    )
}

/// DP and the closed form agree and every table sums to one, `N <= max_n`.
pub fn check_dp_agreement<P>(max_n: u32, sites: &[i64], threads: usize, point: &P) -> CheckOutcome
where
    P: Fn(&WalkQuery) -> DyadicProb + Sync,
{
    let failures = per_site(sites, threads, |z| {
        let mut bad = Vec::new();
        for n in 0..=max_n {
            let closed = joint_table_with(n, z, point).expect("valid site");
            let dp = dp_joint(n, z).expect("valid site");
            if let Some(d) = first_difference(&dp, &closed) {
                bad.push(format!("N={n} Z={z} {d}"));
            }
            if closed.total() != DyadicProb::one() {
                bad.push(format!("N={n} Z={z} closed-form total {}", closed.total()));
            }
        }
        bad
    });
    outcome(
        &format!("DP = closed form, total mass 1 (N <= {max_n}, Z in {sites:?})"),
        failures,
        (max_n as usize + 1) * sites.len(),
    )
}

/// Row sums equal the free walk and column sums equal the closed-form visit
/// marginal; first and second moments agree.
pub fn check_marginals_and_moments<P>(max_n: u32, sites: &[i64], threads: usize, point: &P) -> CheckOutcome
where
    P: Fn(&WalkQuery) -> DyadicProb + Sync,
{
    let failures = per_site(sites, threads, |z| {
        let mut bad = Vec::new();
        for n in 0..=max_n {
            let t = joint_table_with(n, z, point).expect("valid site");
            if t.x_marginal() != marginal_x(n, z).expect("valid site") {
                bad.push(format!("N={n} Z={z} row sums differ from p_N"));
            }
            let mk = marginal_k(n, z).expect("valid site");
            if t.k_marginal() != mk {
                bad.push(format!("N={n} Z={z} column sums differ from visit marginal"));
            }
            if !t.moment_x(1).is_zero() {
                bad.push(format!("N={n} Z={z} E[X] = {}", t.moment_x(1)));
            }
            if t.moment_x(2) != BigRational::from(BigInt::from(n)) {
                bad.push(format!("N={n} Z={z} E[X^2] = {}", t.moment_x(2)));
            }
            for order in [1, 2] {
                if t.moment_k(order) != mk.moment(order) {
                    bad.push(format!("N={n} Z={z} E[K^{order}] joint vs marginal"));
                }
            }
        }
        bad
    });
    outcome(
        &format!("marginal and moment identities (N <= {max_n}, Z in {sites:?})"),
        failures,
        (max_n as usize + 1) * sites.len(),
    )
}

/// Positions whose generating functions are expanded for site `z`.
pub fn gf_positions(z: i64) -> [i64; 5] {
    [-3, 0, 1, z, z + 2]
}

/// Every `lambda^N V^K` coefficient of the joint generating function matches
/// the DP, and `V = 1` gives the free-walk coefficients.
pub fn check_generating_functions(order: usize, sites: &[i64], threads: usize) -> CheckOutcome {
    let failures = per_site(sites, threads, |z| {
        let tables: Vec<JointTable> = (0..=order as u32)
            .map(|n| dp_joint(n, z).expect("valid site"))
            .collect();
        let mut bad = Vec::new();
        for x in gf_positions(z) {
            let gf = joint_gf_coeffs(order, x, z).expect("valid site");
            for (n, table) in tables.iter().enumerate() {
                for k in 0..=order {
                    let expect = table.get(x, k as u32).to_rational();
                    if gf.coeff(n, k) != expect {
                        bad.push(format!("Z={z} X={x} coefficient lambda^{n} V^{k}: {} vs {expect}", gf.coeff(n, k)));
                    }
                }
            }
            let free = free_gf_coeffs(order, x).expect("order >= 1");
            if gf.at_v_one() != free {
                bad.push(format!("Z={z} X={x} V=1 does not collapse to the free walk"));
            }
            for (n, c) in free.coeffs().iter().enumerate() {
                if *c != p_step(n as u32, x).to_rational() {
                    bad.push(format!("Z={z} X={x} free coefficient lambda^{n}"));
                }
            }
        }
        bad
    });
    outcome(
        &format!("generating-function coefficients (order {order}, Z in {sites:?})"),
        failures,
        sites.len() * 5,
    )
}

/// Total variation distance to the limit decreases along `steps` and ends at
/// or below `bound`.
pub fn check_convergence(scaled_sites: &[f64], steps: &[u32], bound: f64) -> CheckOutcome {
    let mut bad = Vec::new();
    let mut detail = Vec::new();
    for &z in scaled_sites {
        let tvs: Vec<f64> = steps
            .iter()
            .map(|&n| {
                convergence_report(n, ScaleMap::new(n).site_for(z))
                    .expect("valid site")
                    .tv
            })
            .collect();
        detail.push(format!("z={z}: {tvs:.5?}"));
        if tvs.windows(2).any(|w| w[1] >= w[0]) {
            bad.push(format!("z={z} TV not decreasing: {tvs:?}"));
        }
        if tvs.last().is_some_and(|&tv| tv > bound) {
            bad.push(format!("z={z} final TV above {bound}"));
        }
    }
    let mut out = outcome(
        &format!("diffusion limit TV decreasing over N in {steps:?}, final <= {bound}"),
        bad,
        scaled_sites.len(),
    );
    if out.passed {
        out.detail = detail.join("; ");
    }
    out
}

/// Runs the suite at `depth` with the given closed-form evaluator.
pub fn run_with<P>(depth: Depth, threads: usize, point: &P) -> VerifyReport
where
    P: Fn(&WalkQuery) -> DyadicProb + Sync,
{
    let small_sites: Vec<i64> = (1..=6).collect();
    let gf_sites = [1, 2, 4];
    let mut checks = vec![
        check_triple_agreement(16, &small_sites, threads, point),
        check_marginals_and_moments(16, &small_sites, threads, point),
    ];
    match depth {
        Depth::Quick => {
            checks.push(check_generating_functions(24, &gf_sites, threads));
        }
        Depth::Full => {
            let sites: Vec<i64> = (1..=8).collect();
            checks.push(check_dp_agreement(64, &sites, threads, point));
            checks.push(check_marginals_and_moments(64, &sites, threads, point));
            checks.push(check_generating_functions(48, &gf_sites, threads));
            checks.push(check_convergence(&[0.5, 1.0], &[256, 1024, 4096], 0.05));
        }
    }
    VerifyReport { depth, checks }
}

/// Runs the suite at `depth` against the closed form.
pub fn run(depth: Depth, threads: usize) -> VerifyReport {
    run_with(depth, threads, &crate::exactwalk::joint_point)
}
