//! Result files: a JSON document with everything, a CSV table with one line
//! per row in a fixed column order, and `.dat` plot series.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::Experiment;
use crate::result::ResultSet;
use crate::{CliError, SCHEMA};

/// Leading CSV columns, shared by every experiment.
pub const COMMON_COLUMNS: [&str; 9] = ["schema", "experiment", "row", "label", "N", "p", "q", "alpha", "gamma"];

/// Quantity and flag columns of `e`, in table order.
pub fn columns(e: Experiment) -> (&'static [&'static str], &'static [&'static str]) {
    match e {
        Experiment::PdScan => (
            &[
                "lambda_rad",
                "lambda_rad_err",
                "lambda_full",
                "lambda_full_err",
                "ratio",
                "ratio_err",
                "margin",
                "combined_err",
                "angular_variation",
                "iterations",
                "bump",
                "weight_bound_lambda_rad",
                "weight_bound",
                "weight_bound_tol",
            ],
            &[
                "radial_broken",
                "full_below_rad",
                "bump_applicable",
                "full_below_bump",
                "weight_bound_holds",
            ],
        ),
        Experiment::PmSolve => (
            &[
                "lambda",
                "lambda_err",
                "closed_form",
                "closed_form_rel_err",
                "euler_residual",
                "multiplier",
                "weighted_mean",
                "angular_variation",
                "iterations",
                "fss_violation",
                "pole",
            ],
            &["closed_form_match", "fss_symmetric"],
        ),
        Experiment::PmQScan => (
            &[
                "lambda",
                "lambda_err",
                "lambda_euler_residual",
                "lambda_as",
                "lambda_as_err",
                "lambda_half",
                "lambda_half_err",
                "margin",
                "combined_err",
                "odd_extension_bound",
                "power_factor_bound",
                "ubar_energy",
                "ubar_qsum",
                "ubar_qsum_expected",
                "ubar_integral",
                "competitor",
                "chain_bound",
            ],
            &[
                "antisym_broken",
                "subset_monotone",
                "odd_extension_bound_holds",
                "power_factor_bound_holds",
                "competitor_bound_holds",
                "chain_conclusive",
                "chain_holds",
            ],
        ),
        Experiment::SwCompare => (
            &[
                "weighted_measure",
                "r_sharp",
                "mu_domain",
                "mu_domain_err",
                "mu_ball",
                "mu_ball_fe",
                "certificate",
                "margin",
            ],
            &[
                "inequality_holds",
                "strict",
                "certificate_above_domain",
                "certificate_below_ball",
            ],
        ),
        Experiment::BesselTable => (
            &[
                "radius",
                "nu0",
                "tau1",
                "upsilon1",
                "angular_margin",
                "identity_robin",
                "identity_zero",
                "nu1",
                "x_nu1_1",
                "lambda_q2",
            ],
            &["angular_below_radial", "identity_holds"],
        ),
        Experiment::RearrangeCheck => (
            &[
                "trials",
                "energy_gap_random_max",
                "energy_gap_random_min",
                "energy_gap_smooth_max",
                "hl_lower_slack_min",
                "hl_upper_slack_min",
                "fss_violation_max",
            ],
            &[
                "equimeasurable",
                "energy_nonincreasing",
                "energy_equal_random",
                "energy_equal_smooth",
                "hl_holds",
                "fss_constructed",
            ],
        ),
    }
}

/// Full CSV header of `e`.
pub fn header(e: Experiment) -> Vec<&'static str> {
    let (q, f) = columns(e);
    let mut h = COMMON_COLUMNS.to_vec();
    h.extend_from_slice(q);
    h.extend_from_slice(f);
    h.push("error");
    h
}

#[derive(Serialize)]
struct SchemaDocument {
    schema: &'static str,
    columns: BTreeMap<&'static str, Vec<&'static str>>,
}

/// The column layout of every experiment as pretty JSON, the content of
/// `schema/columns.json`.
pub fn schema_document() -> String {
    let doc = SchemaDocument {
        schema: SCHEMA,
        columns: Experiment::ALL.iter().map(|&e| (e.name(), header(e))).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("schema serializes");
    s.push('\n');
    s
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// The CSV table of `rs` as bytes.
pub fn csv_bytes(rs: &ResultSet) -> Result<Vec<u8>, CliError> {
    let e = rs.metadata.experiment;
    let (quantities, flags) = columns(e);
    let fmt_err = |message: String| CliError::Format {
        path: PathBuf::from(format!("{}.csv", rs.stem())),
        message,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header(e)).map_err(|err| fmt_err(err.to_string()))?;
    for row in &rs.rows {
        let r = &row.record;
        if let Some(k) = r.quantities.keys().find(|k| !quantities.contains(&k.as_str())) {
            return Err(fmt_err(format!("row {}: quantity '{k}' has no column", row.index)));
        }
        if let Some(k) = r.flags.keys().find(|k| !flags.contains(&k.as_str())) {
            return Err(fmt_err(format!("row {}: flag '{k}' has no column", row.index)));
        }
        let p = &r.params;
        let mut line = vec![
            rs.schema.clone(),
            e.name().to_string(),
            row.index.to_string(),
            r.label.clone(),
            p.dimension.to_string(),
            real(p.p),
            real(p.q),
            real(p.alpha),
            real(p.gamma),
        ];
        line.extend(quantities.iter().map(|q| r.get(q).map(real).unwrap_or_default()));
        line.extend(
            flags
                .iter()
                .map(|f| r.flags.get(*f).map(|b| b.to_string()).unwrap_or_default()),
        );
        line.push(r.error.clone().unwrap_or_default());
        w.write_record(&line).map_err(|err| fmt_err(err.to_string()))?;
    }
    w.into_inner().map_err(|err| fmt_err(err.to_string()))
}

/// Writes `bytes` to a temporary sibling of `path`, then renames it over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension(format!(
        "{}.tmp{}",
        path.extension().and_then(|s| s.to_str()).unwrap_or(""),
        std::process::id()
    ));
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(&tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Paths produced by [`emit`].
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub json: PathBuf,
    pub csv: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Writes the JSON document, the CSV table and the plot series of `rs` into
/// `dir`, named after the experiment and config hash.
pub fn emit(rs: &ResultSet, dir: &Path) -> Result<Written, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let stem = rs.stem();
    let csv = csv_bytes(rs)?;
    let json_path = dir.join(format!("{stem}.json"));
    let mut json = serde_json::to_vec_pretty(rs).map_err(|e| CliError::Format {
        path: json_path.clone(),
        message: e.to_string(),
    })?;
    json.push(b'\n');
    write_atomic(&json_path, &json)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    write_atomic(&csv_path, &csv)?;
    let mut plots = Vec::new();
    for s in &rs.series {
        let path = dir.join(format!("{stem}-{}.dat", s.name));
        let mut text = format!("# {}\n# {} {}\n", rs.schema, s.x, s.y);
        for &(x, y) in &s.points {
            text.push_str(&format!("{} {}\n", real(x), real(y)));
        }
        write_atomic(&path, text.as_bytes())?;
        plots.push(path);
    }
    Ok(Written {
        json: json_path,
        csv: csv_path,
        plots,
    })
}

/// Reads a JSON document written by [`emit`].
pub fn read_result_set(path: &Path) -> Result<ResultSet, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let rs: ResultSet = serde_json::from_str(&text).map_err(|e| CliError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if rs.schema != SCHEMA {
        return Err(CliError::Format {
            path: path.to_path_buf(),
            message: format!("schema '{}', expected '{SCHEMA}'", rs.schema),
        });
    }
    Ok(rs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn column_names_are_unique() {
        for e in Experiment::ALL {
            let h = header(e);
            assert_eq!(h.iter().collect::<HashSet<_>>().len(), h.len(), "{e}");
        }
    }

    #[test]
    fn reals_carry_seventeen_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(real(-2.0), "-2.0000000000000000e0");
    }
}
