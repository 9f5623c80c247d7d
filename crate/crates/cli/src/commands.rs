//! One function per subcommand, each building an [`OutputRecord`].

use num_rational::BigRational;
use num_traits::ToPrimitive;

use walkvisits_core::asymptotics::{
    density_maxima_grid, no_visit_weight, no_visit_weight_closed, GridAxis, ScaledJointDensity,
};
use walkvisits_core::exactwalk::{joint_table, marginal_k, marginal_x, moments_k, moments_x};
use walkvisits_core::montecarlo::{gof_compare, simulate};
use walkvisits_core::verify::{self, flipped_sign_point, Depth, VerifyReport};
use walkvisits_core::{DyadicProb, Result as WalkResult};

use crate::output::{Cell, OutputRecord, Table};

fn prob_cells(p: &DyadicProb) -> [Cell; 2] {
    [p.to_string().into(), p.to_f64().into()]
}

fn rational_cells(r: &BigRational) -> [Cell; 2] {
    [r.to_string().into(), r.to_f64().unwrap_or(f64::NAN).into()]
}

pub fn joint(n: u32, z: i64) -> WalkResult<OutputRecord> {
    let t = joint_table(n, z)?;
    let mut rec = OutputRecord::new(format!("joint --n {n} --z {z}"));
    rec.param("n", n).param("z", z);
    let mut table = Table::new("joint", &["X", "K", "prob_exact", "prob_float"]);
    for (x, k, p) in t.iter() {
        let [e, f] = prob_cells(p);
        table.push(vec![x.into(), k.into(), e, f]);
    }
    rec.tables.push(table);
    rec.footer.insert("cells".into(), t.len().to_string());
    rec.footer.insert("total".into(), t.total().to_string());
    Ok(rec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    X,
    K,
}

pub fn marginal(n: u32, z: i64, which: Which) -> WalkResult<OutputRecord> {
    let joint = joint_table(n, z)?;
    let label = match which {
        Which::X => "x",
        Which::K => "k",
    };
    let mut rec = OutputRecord::new(format!("marginal --which {label} --n {n} --z {z}"));
    rec.param("n", n).param("z", z).param("which", label);
    let (table, total, consistent, check) = match which {
        Which::X => {
            let m = marginal_x(n, z)?;
            let sums = joint.x_marginal();
            let mut table = Table::new("marginal_x", &["X", "prob_exact", "prob_float"]);
            for (x, p) in m.iter().filter(|(_, p)| !p.is_zero()) {
                let [e, f] = prob_cells(p);
                table.push(vec![x.into(), e, f]);
            }
            let span = -(n as i64)..=n as i64;
            let consistent = span.into_iter().all(|x| m.get(x) == sums.get(x));
            (table, m.total(), consistent, "joint_row_sums_match")
        }
        Which::K => {
            let m = marginal_k(n, z)?;
            let sums = joint.k_marginal();
            let mut table = Table::new("marginal_k", &["K", "prob_exact", "prob_float"]);
            for (k, p) in m.iter().filter(|(_, p)| !p.is_zero()) {
                let [e, f] = prob_cells(p);
                table.push(vec![k.into(), e, f]);
            }
            let consistent = (0..=n).all(|k| m.get(k) == sums.get(k));
            (table, m.total(), consistent, "joint_column_sums_match")
        }
    };
    rec.tables.push(table);
    rec.footer.insert(check.into(), consistent.to_string());
    rec.footer.insert("total".into(), total.to_string());
    Ok(rec)
}

pub fn moments(n: u32, z: i64) -> WalkResult<OutputRecord> {
    let (ex, ex2) = moments_x(n, z)?;
    let ek = moments_k(n, z, 1)?;
    let ek2 = moments_k(n, z, 2)?;
    let mut rec = OutputRecord::new(format!("moments --n {n} --z {z}"));
    rec.param("n", n).param("z", z);
    let mut table = Table::new("moments", &["moment", "exact", "float"]);
    for (name, value) in [("E(X)", &ex), ("E(X^2)", &ex2), ("E(K)", &ek), ("E(K^2)", &ek2)] {
        let [e, f] = rational_cells(value);
        table.push(vec![name.into(), e, f]);
    }
    rec.tables.push(table);
    Ok(rec)
}

pub fn limit(z: f64, grid: &str, x_axis: GridAxis, k_axis: GridAxis) -> WalkResult<OutputRecord> {
    let density = ScaledJointDensity::new(z)?;
    let mut rec = OutputRecord::new(format!("limit --z {z:?} --grid {grid}"));
    rec.param("z", format!("{z:?}")).param("grid", grid);
    rec.header.insert("C".into(), format!("{:?}", no_visit_weight_closed(z)?));
    rec.header.insert("C_quadrature".into(), format!("{:?}", no_visit_weight(z)?));

    let mut table = Table::new("grid", &["x", "k", "atom", "continuous"]);
    for x in x_axis.points() {
        let atom = density.atom(x);
        for k in k_axis.points() {
            table.push(vec![x.into(), k.into(), atom.into(), density.continuous(x, k).into()]);
        }
    }
    rec.tables.push(table);

    let mut ridge = Table::new("ridge", &["x", "k_star", "max_density", "atom"]);
    for p in density_maxima_grid(z, &x_axis)? {
        ridge.push(vec![p.x.into(), p.k_star.into(), p.max_density.into(), p.atom.into()]);
    }
    rec.tables.push(ridge);
    Ok(rec)
}

pub struct SimulateArgs {
    pub n: u32,
    pub z: i64,
    pub trials: u64,
    pub seed: u64,
    pub tv_threshold: f64,
    pub workers: usize,
}

/// Histogram against the exact table. The second value is whether TV is
/// within the threshold.
pub fn simulate_cmd(a: &SimulateArgs) -> WalkResult<(OutputRecord, bool)> {
    let hist = simulate(a.n, a.z, a.trials, a.seed, a.workers)?;
    let exact = joint_table(a.n, a.z)?;
    let gof = gof_compare(&hist, &exact)?;

    let mut rec = OutputRecord::new(format!(
        "simulate --n {} --z {} --trials {} --seed {} --tv-threshold {:?}",
        a.n, a.z, a.trials, a.seed, a.tv_threshold
    ));
    rec.param("n", a.n)
        .param("z", a.z)
        .param("trials", a.trials)
        .param("seed", a.seed)
        .param("tv_threshold", format!("{:?}", a.tv_threshold));

    let mut cells: Vec<(i64, u32)> = exact.iter().map(|(x, k, _)| (x, k)).collect();
    cells.extend(hist.iter().map(|(x, k, _)| (x, k)));
    cells.sort_unstable();
    cells.dedup();
    let mut table = Table::new("histogram", &["X", "K", "count", "frequency", "prob_exact", "prob_float"]);
    for (x, k) in cells {
        let count = hist.count(x, k);
        let [e, f] = prob_cells(&exact.get(x, k));
        table.push(vec![
            x.into(),
            k.into(),
            Cell::Int(count as i64),
            (count as f64 / a.trials as f64).into(),
            e,
            f,
        ]);
    }
    rec.tables.push(table);

    let within = gof.tv <= a.tv_threshold;
    rec.footer.insert("tv".into(), format!("{:?}", gof.tv));
    rec.footer.insert("chi_square".into(), format!("{:?}", gof.chi_square));
    rec.footer.insert("dof".into(), gof.dof.to_string());
    rec.footer.insert("p_value".into(), format!("{:?}", gof.p_value));
    rec.footer.insert("tv_within_threshold".into(), within.to_string());
    Ok((rec, within))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Flip the sign between the two terms of the `K >= 1` closed form.
    Sign,
}

pub fn verify_cmd(depth: Depth, fault: Option<Fault>, workers: usize) -> (OutputRecord, VerifyReport) {
    let report = match fault {
        None => verify::run(depth, workers),
        Some(Fault::Sign) => verify::run_with(depth, workers, &flipped_sign_point),
    };
    let label = match depth {
        Depth::Quick => "quick",
        Depth::Full => "full",
    };
    let mut command = format!("verify --depth {label}");
    if fault.is_some() {
        command.push_str(" --inject-fault sign");
    }
    let mut rec = OutputRecord::new(command);
    rec.param("depth", label);
    if fault.is_some() {
        rec.param("inject_fault", "sign");
    }
    let mut table = Table::new("checks", &["check", "passed", "detail"]);
    for c in &report.checks {
        table.push(vec![c.name.clone().into(), c.passed.to_string().into(), c.detail.clone().into()]);
    }
    rec.tables.push(table);
    rec.footer.insert("passed".into(), report.passed().to_string());
    (rec, report)
}
