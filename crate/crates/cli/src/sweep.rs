//! Many holes against one model, one CSV row per (hole, method).

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::compute::{agreement, evaluate, Prepared, Status, Verdict};
use crate::model::{parse_hole, parse_holes_file, ModelFile};
use crate::{CliError, SweepArgs};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub hole: String,
    pub r: String,
    pub method: String,
    pub exp_rate: String,
    pub rate: String,
    /// Verdict across every method run on the hole.
    pub agreement: String,
    pub error: String,
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Agree => "agree",
        Verdict::Disagree => "disagree",
        Verdict::Single => "single",
    }
}

fn number(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

pub fn run(args: &SweepArgs) -> Result<Vec<Row>, CliError> {
    let tol = args.common.tolerances()?;
    let file = ModelFile::read(&args.model)?;
    let text = std::fs::read_to_string(&args.holes)
        .map_err(|e| CliError::Parse(format!("{}: {e}", args.holes.display())))?;
    let prepared = Prepared::new(file.load()?, args.common.mode)?;
    let arith = prepared.arith();
    let model = &prepared.loaded.model;
    let lines = parse_holes_file(&text);
    // par_iter + collect keeps the input order
    let rows: Vec<Vec<Row>> = lines
        .par_iter()
        .map(|(line, words)| {
            let label = words.join(" ");
            let hole = match parse_hole(model, words) {
                Ok(h) => h,
                Err(e) => {
                    return vec![Row {
                        hole: label,
                        r: String::new(),
                        method: String::new(),
                        exp_rate: String::new(),
                        rate: String::new(),
                        agreement: String::new(),
                        error: format!("line {line}: {e}"),
                    }]
                }
            };
            let outcomes = evaluate(arith, &hole, args.method, &tol, args.common.oracle_terms);
            let verdict = verdict_name(agreement(&outcomes, &tol).0);
            outcomes
                .iter()
                .filter(|o| o.status != Status::Skipped)
                .map(|o| {
                    let res = o.result.as_ref();
                    Row {
                        hole: label.clone(),
                        r: hole.r().to_string(),
                        method: o.method.to_string(),
                        exp_rate: res.map(|x| number(x.exp_rate)).unwrap_or_default(),
                        rate: res.map(|x| number(x.rate)).unwrap_or_default(),
                        agreement: verdict.to_string(),
                        error: o.message.clone().filter(|_| o.status == Status::Error).unwrap_or_default(),
                    }
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

const HEADER: [&str; 7] = ["hole", "r", "method", "exp_rate", "rate", "agreement", "error"];

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let fail = |e: csv::Error| CliError::Compute(format!("writing CSV: {e}"));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    // written by hand so an empty sweep still gets a header
    w.write_record(HEADER).map_err(fail)?;
    for row in rows {
        w.serialize(row).map_err(fail)?;
    }
    w.flush().map_err(|e| CliError::Compute(format!("writing CSV: {e}")))
}
