//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#[allow(dead_code)]
#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::time::Instant;

use oracle::Rational;
use weightlab_cli::config::FileConfig;
use weightlab_cli::output::csv_bytes;
use weightlab_cli::{emit, run, Experiment, Overrides, ResolvedConfig, ResultSet, Row};
use weightlab_core::bessel::{bessel_j, bessel_j_prime, bessel_zero, bessel_zeros, robin_root, BesselOrder};
use weightlab_core::diskspec::{DiskSpectrumParams, Weinberger};

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, id: usize, name: &str, ok: bool, detail: String) {
        println!("{} {id:>2}. {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id);
        }
    }
}

fn config(e: Experiment, toml: &str) -> ResolvedConfig {
    ResolvedConfig::resolve(
        e,
        &FileConfig::parse(toml).expect("valid config"),
        &Overrides::default(),
    )
    .expect("resolvable config")
}

fn execute(e: Experiment, toml: &str) -> (ResultSet, f64) {
    let t = Instant::now();
    let rs = run(&config(e, toml), 0).expect("experiment runs");
    (rs, t.elapsed().as_secs_f64())
}

fn q(r: &Row, name: &str) -> f64 {
    r.record.get(name).unwrap_or(f64::NAN)
}

fn flag(r: &Row, name: &str) -> bool {
    r.record.flags.get(name).copied().unwrap_or(false)
}

fn no_errors(rs: &ResultSet) -> bool {
    rs.failed_rows() == 0
}

fn bessel_oracle(rep: &mut Report) {
    let t = Instant::now();
    let mut xs: Vec<Rational> = (1..=97).map(|i| Rational { p: 30 * i, q: 97 }).collect();
    xs.extend([
        Rational { p: 1, q: 1000 },
        Rational { p: 1, q: 10 },
        Rational { p: 7, q: 3 },
    ]);
    let mut worst = 0.0_f64;
    for &nu in &[0.0, 0.5, 1.0, 1.5, 2.0] {
        let order = BesselOrder::new(nu).unwrap();
        for &x in &xs {
            let j = bessel_j(order, x.value()).unwrap();
            let jp = bessel_j_prime(order, x.value()).unwrap();
            let (wj, wjp) = (oracle::j_ref(nu, x), oracle::jp_ref(nu, x));
            worst = worst.max((j - wj).abs() / wj.abs()).max((jp - wjp).abs() / wjp.abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    rep.line(
        1,
        "Bessel oracle agreement",
        worst <= 1e-10 && secs < 5.0,
        format!("max rel err {worst:.2e} (tol 1e-10), {secs:.2} s (limit 5 s)"),
    );
}

fn zeros(rep: &mut Report) {
    let j01 = oracle::bisect(|x| oracle::j_series_f64(0.0, x), 2.0, 3.0);
    let j11 = oracle::bisect(|x| oracle::j_series_f64(1.0, x), 3.5, 4.0);
    let jp11 = oracle::bisect(
        |x| x * oracle::j_series_f64(0.0, x) - oracle::j_series_f64(1.0, x),
        1.5,
        2.0,
    );
    let o = |nu: f64| BesselOrder::new(nu).unwrap();
    let lib = [
        bessel_zero(o(0.0), 1).unwrap().value,
        bessel_zero(o(1.0), 1).unwrap().value,
        robin_root(o(1.0), 0.0, 1).unwrap().value,
    ];
    let refs = [2.4048255577, 3.8317059702, 1.8411837813];
    let mut worst = 0.0_f64;
    for ((l, b), r) in lib.iter().zip([j01, j11, jp11]).zip(refs) {
        worst = worst.max((l - b).abs()).max((b - r).abs());
    }
    let mut interlaced = true;
    for &nu in &[0.0, 0.5, 1.0, 2.0] {
        let a = bessel_zeros(o(nu), 6).unwrap();
        let b = bessel_zeros(o(nu + 1.0), 5).unwrap();
        interlaced &= (0..5).all(|k| a[k].value < b[k].value && b[k].value < a[k + 1].value);
    }
    rep.line(
        2,
        "zero and root suite",
        worst <= 1e-9 && interlaced,
        format!("max abs err {worst:.2e} (tol 1e-9), interlacing {interlaced}"),
    );
}

fn q2_closed_form(rep: &mut Report, pm: &ResultSet, secs: f64) {
    let rows: Vec<&Row> = pm.rows.iter().filter(|r| r.record.params.q == 2.0).collect();
    let worst = rows.iter().map(|r| q(r, "closed_form_rel_err")).fold(0.0, f64::max);
    let disk = rows
        .iter()
        .find(|r| r.record.params.alpha == 0.0)
        .map(|r| q(r, "lambda"));
    let disk_err = disk
        .map(|v| (v - 3.3899810111).abs() / 3.3899810111)
        .unwrap_or(f64::NAN);
    let ok = no_errors(pm)
        && rows.len() == 5
        && rows.iter().all(|r| flag(r, "closed_form_match"))
        && disk_err <= 5e-3
        && secs < 120.0;
    rep.line(
        3,
        "mean-zero q = 2 closed form",
        ok,
        format!(
            "max rel err {worst:.2e} over {} alphas, disk rel err {disk_err:.2e} (tol 5e-3), {secs:.1} s (limit 120 s)",
            rows.len()
        ),
    );
}

fn identity(rep: &mut Report) {
    let (rs, _) = execute(
        Experiment::BesselTable,
        "[params]\nN = [2]\nalpha = [0.5, 1.0, 1.5]\nradius = 1.0\n",
    );
    let worst = rs
        .rows
        .iter()
        .map(|r| (q(r, "identity_robin") - q(r, "identity_zero")).abs())
        .fold(0.0, f64::max);
    let ok = no_errors(&rs) && rs.rows.len() == 3 && rs.rows.iter().all(|r| flag(r, "identity_holds"));
    rep.line(
        4,
        "Robin root equals next-order zero",
        ok,
        format!("max abs diff {worst:.2e} (tol 1e-9)"),
    );
}

fn angular_below_radial(rep: &mut Report) {
    let (rs, secs) = execute(Experiment::BesselTable, "");
    let min = rs
        .rows
        .iter()
        .map(|r| q(r, "angular_margin"))
        .fold(f64::INFINITY, f64::min);
    let ok =
        no_errors(&rs) && rs.rows.len() == 36 && rs.rows.iter().all(|r| flag(r, "angular_below_radial")) && secs < 10.0;
    rep.line(
        5,
        "angular below radial Neumann eigenvalue",
        ok,
        format!(
            "{} rows, min margin {min:.3e} (need > 1e-6), {secs:.2} s (limit 10 s)",
            rs.rows.len()
        ),
    );
}

fn weinberger(rep: &mut Report) {
    let mut max_slope = f64::NEG_INFINITY;
    let mut count = 0;
    for &(n, alpha) in &[(2, 0.5), (2, 1.0), (3, 1.0), (3, 2.0)] {
        let w = Weinberger::new(DiskSpectrumParams::new(n, alpha, 1.0).unwrap()).unwrap();
        let slopes = w.n_slopes(1e-3, 3.0 * w.r_sharp(), 1000).unwrap();
        count += slopes.len();
        max_slope = slopes.iter().map(|s| s.1).fold(max_slope, f64::max);
    }
    rep.line(
        6,
        "Weinberger N(r) decreasing",
        max_slope < 0.0 && count == 4000,
        format!("{count} samples, largest slope {max_slope:.3e} (need < 0)"),
    );
}

fn szego_weinberger(rep: &mut Report) {
    let (rs, secs) = execute(Experiment::SwCompare, "domains = [\"disk\", \"square\"]\n");
    let mut detail = Vec::new();
    let mut ok = no_errors(&rs) && rs.rows.len() == 4;
    for r in &rs.rows {
        let a = r.record.params.alpha;
        if r.record.label == "square" {
            ok &= flag(r, "strict");
            detail.push(format!(
                "square a={a}: margin {:.4} vs 3 err {:.4}",
                q(r, "margin"),
                3.0 * q(r, "mu_domain_err")
            ));
        } else {
            let rel = (q(r, "mu_domain") / q(r, "mu_ball") - 1.0).abs();
            ok &= rel <= 5e-3;
            detail.push(format!("disk a={a}: rel {rel:.2e}"));
        }
    }
    rep.line(
        7,
        "square below equal-measure disk",
        ok,
        format!("{}; {secs:.1} s", detail.join(", ")),
    );
}

fn pd_trend(rep: &mut Report) {
    let (rs, secs) = execute(Experiment::PdScan, "");
    let ratios: Vec<f64> = rs.rows.iter().map(|r| q(r, "ratio")).collect();
    // each step must exceed the summed error estimates of its endpoints
    let increasing = rs
        .rows
        .windows(2)
        .all(|w| q(&w[1], "ratio") - q(&w[0], "ratio") > q(&w[0], "ratio_err") + q(&w[1], "ratio_err"));
    let slope = rs.summary.get("bump_slope").copied().unwrap_or(f64::NAN);
    let target = rs.summary.get("bump_slope_target").copied().unwrap_or(f64::NAN);
    let slope_ok = (slope - target).abs() <= 0.15 * target.abs();
    let last = rs.rows.last().expect("rows");
    let broken = flag(last, "radial_broken");
    let ratio_text: Vec<String> = ratios.iter().map(|r| format!("{r:.13}")).collect();
    rep.line(
        8,
        "radial symmetry breaking trend",
        no_errors(&rs) && increasing && slope_ok && broken,
        format!(
            "ratios [{}] certified strictly increasing {increasing}; bump slope {slope:.3} vs {target:.3} (tol 15%) {slope_ok}; \
             gamma=32 margin {:.2} vs 3 err {:.2e} broken {broken}; {secs:.1} s",
            ratio_text.join(", "),
            q(last, "margin"),
            3.0 * q(last, "combined_err"),
        ),
    );
}

fn pm_trend(rep: &mut Report) {
    let (rs, secs) = execute(Experiment::PmQScan, "");
    let tail: Vec<f64> = rs
        .rows
        .iter()
        .filter(|r| r.record.params.q >= 4.0)
        .map(|r| q(r, "lambda_as"))
        .collect();
    let as_ok = tail.windows(2).all(|w| w[1] <= w[0]);
    let half: Vec<f64> = rs.rows.iter().map(|r| q(r, "lambda_half")).collect();
    let half_ok = half.windows(2).all(|w| w[1] < w[0]);
    let broken: Vec<f64> = rs
        .rows
        .iter()
        .filter(|r| flag(r, "antisym_broken"))
        .map(|r| r.record.params.q)
        .collect();
    let q2 = rs.rows.iter().find(|r| r.record.params.q == 2.0).expect("q = 2 row");
    let q2_gap = q(q2, "margin").abs();
    let q2_ok = q2_gap <= q(q2, "combined_err").max(1e-9 * q(q2, "lambda"));
    let half_text: Vec<String> = half.iter().map(|v| format!("{v:.4}")).collect();
    rep.line(
        9,
        "antisymmetry breaking trend",
        no_errors(&rs) && as_ok && half_ok && !broken.is_empty() && q2_ok,
        format!(
            "lambda_as nonincreasing from q=4 {as_ok}; half-disk [{}] decreasing {half_ok}; broken at q {broken:?}; \
             q=2 gap {q2_gap:.2e} {q2_ok}; {secs:.1} s",
            half_text.join(", ")
        ),
    );
}

fn rearrangement(rep: &mut Report, pm: &ResultSet) {
    let (energy, _) = execute(
        Experiment::RearrangeCheck,
        "seed = 1\n[params]\nalpha = 0.5\n[rearrange]\ntrials = 100\n",
    );
    let (hl, _) = execute(
        Experiment::RearrangeCheck,
        "seed = 2\n[params]\nalpha = 0.5\n[rearrange]\ntrials = 1000\n",
    );
    let e = &energy.rows[0];
    let h = &hl.rows[0];
    let equi = flag(e, "equimeasurable") && flag(h, "equimeasurable");
    let equal = flag(e, "energy_equal_random");
    let hl_ok = flag(h, "hl_holds");
    let fss_rows: Vec<&Row> = pm
        .rows
        .iter()
        .filter(|r| [2.0, 3.0].contains(&r.record.params.q))
        .collect();
    let fss = fss_rows.iter().all(|r| flag(r, "fss_symmetric"));
    let worst = fss_rows.iter().map(|r| q(r, "fss_violation")).fold(0.0, f64::max);
    rep.line(
        10,
        "rearrangement suite",
        no_errors(&energy) && no_errors(&hl) && equi && equal && hl_ok && fss,
        format!(
            "equimeasurable {equi}; two-point energy gap on 100 fields in [{:.3e}, {:.3e}] (tol 1e-12) {equal}; \
             Hardy-Littlewood on 1000 pairs {hl_ok}; fss on {} minimizers {fss} (worst {worst:.1e})",
            q(e, "energy_gap_random_min"),
            q(e, "energy_gap_random_max"),
            fss_rows.len()
        ),
    );
}

fn determinism(rep: &mut Report) {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut identical = true;
    let mut names = Vec::new();
    for (e, toml) in [
        (Experiment::RearrangeCheck, "seed = 11\n[rearrange]\ntrials = 20\n"),
        (
            Experiment::PmQScan,
            "seed = 11\n[params]\nq = [2.0, 4.0, 8.0]\n[grid]\nm = 60\nk = 32\n",
        ),
    ] {
        let mut bytes = Vec::new();
        for (i, d) in dirs.iter().enumerate() {
            let rs = run(&config(e, toml), i + 1).expect("experiment runs");
            let w = emit(&rs, d.path()).expect("emit");
            let file = std::fs::read(&w.csv).expect("table");
            identical &= file == csv_bytes(&rs).expect("table");
            bytes.push(file);
        }
        identical &= bytes[0] == bytes[1];
        names.push(e.name());
    }
    rep.line(
        11,
        "determinism",
        identical,
        format!(
            "CSV byte-identical across two runs of {}: {identical}",
            names.join(" and ")
        ),
    );
}

fn main() {
    let mut rep = Report { failed: Vec::new() };
    let (pm, pm_secs) = execute(Experiment::PmSolve, "");
    bessel_oracle(&mut rep);
    zeros(&mut rep);
    q2_closed_form(&mut rep, &pm, pm_secs);
    identity(&mut rep);
    angular_below_radial(&mut rep);
    weinberger(&mut rep);
    szego_weinberger(&mut rep);
    pd_trend(&mut rep);
    pm_trend(&mut rep);
    rearrangement(&mut rep, &pm);
    determinism(&mut rep);
    if rep.failed.is_empty() {
        println!("all 11 criteria pass");
    } else {
        println!("failed criteria: {:?}", rep.failed);
        std::process::exit(1);
    }
}
