//! Running the escape-rate methods on a loaded model.

use escape_core::spectral::topological_pressures;
use escape_core::{
    escape_rate_genfun, escape_rate_parry, escape_rate_poly, escape_rate_spectral, estimate_rate_oracle,
    format_rational, pressures, EscapeRateResult, FloatMeasure, HoleSpec, MarkovMeasure, Pressures, Scalar,
    Tolerances,
};
use serde::Serialize;

use crate::model::{parse_hole, Loaded, LoadedMeasure, MeasureKind, ModelFile};
use crate::report::{self, Num};
use crate::{CliError, ComputeArgs, MethodArg, ModeArg};

/// Oracle estimates are compared against certified values at this tolerance.
pub const ORACLE_AGREEMENT: f64 = 1e-3;

/// The measure a run actually uses.
#[derive(Clone, Copy, Debug)]
pub enum Arith<'a> {
    Exact(&'a MarkovMeasure<escape_core::Rational>),
    Float(&'a FloatMeasure),
    /// Float weights, but the spectral route is exact through `lambda(A)`.
    Parry(&'a FloatMeasure),
}

impl Arith<'_> {
    pub fn mode(&self) -> ModeArg {
        match self {
            Arith::Exact(_) => ModeArg::Exact,
            _ => ModeArg::Float,
        }
    }
}

/// Holds the float copy when a rational measure runs in float mode.
pub struct Prepared {
    pub loaded: Loaded,
    float: Option<FloatMeasure>,
}

impl Prepared {
    pub fn new(loaded: Loaded, mode: Option<ModeArg>) -> Result<Self, CliError> {
        let float = match (&loaded.measure, mode) {
            (LoadedMeasure::Exact(m), Some(ModeArg::Float)) => Some(m.to_float()),
            (LoadedMeasure::Float(_), Some(ModeArg::Exact)) => {
                return Err(CliError::Usage(
                    "exact mode needs rational transition weights; the parry measure is float only".into(),
                ))
            }
            _ => None,
        };
        Ok(Prepared { loaded, float })
    }

    pub fn arith(&self) -> Arith<'_> {
        match (&self.loaded.measure, &self.float) {
            (_, Some(f)) => Arith::Float(f),
            (LoadedMeasure::Exact(m), None) => Arith::Exact(m),
            (LoadedMeasure::Float(m), None) if self.loaded.kind == MeasureKind::Parry => Arith::Parry(m),
            (LoadedMeasure::Float(m), None) => Arith::Float(m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Skipped,
    Error,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub method: &'static str,
    pub status: Status,
    pub result: Option<EscapeRateResult>,
    pub message: Option<String>,
}

impl Outcome {
    fn skipped(method: &'static str, why: impl Into<String>) -> Self {
        Outcome {
            method,
            status: Status::Skipped,
            result: None,
            message: Some(why.into()),
        }
    }

    fn from(method: &'static str, r: escape_core::Result<EscapeRateResult>) -> Self {
        match r {
            Ok(r) => Outcome {
                method,
                status: Status::Ok,
                result: Some(r),
                message: None,
            },
            Err(e) => Outcome {
                method,
                status: Status::Error,
                result: None,
                message: Some(e.to_string()),
            },
        }
    }

    pub fn is_oracle(&self) -> bool {
        self.method == "oracle"
    }
}

fn methods(choice: MethodArg) -> &'static [&'static str] {
    match choice {
        MethodArg::Spectral => &["spectral"],
        MethodArg::Generating => &["generating"],
        MethodArg::Polynomial => &["polynomial"],
        MethodArg::Oracle => &["oracle"],
        MethodArg::All => &["spectral", "generating", "polynomial", "oracle"],
    }
}

/// Why a method cannot run here, if it cannot.
fn inapplicable(method: &str, arith: Arith<'_>, hole: &HoleSpec) -> Option<String> {
    let exact = matches!(arith, Arith::Exact(_));
    match method {
        "generating" | "polynomial" if !exact => Some("skipped (float mode): exact arithmetic required".into()),
        "polynomial" if !hole.is_single_word() => Some(format!(
            "polynomial method needs a single-word hole, got {} words",
            hole.words().len()
        )),
        "polynomial" if hole.r() < 2 => Some("polynomial method needs a word of length at least 2".into()),
        _ => None,
    }
}

fn run_method<S: Scalar>(
    method: &'static str,
    m: &MarkovMeasure<S>,
    hole: &HoleSpec,
    tol: &Tolerances,
    terms: usize,
) -> Outcome {
    match method {
        "spectral" => Outcome::from(method, escape_rate_spectral(m, hole, tol)),
        "generating" => Outcome::from(method, escape_rate_genfun(m, hole, tol)),
        "polynomial" => Outcome::from(method, escape_rate_poly(m, &hole.words()[0], tol)),
        "oracle" => Outcome::from(method, estimate_rate_oracle(m, hole, terms).map(|e| e.result)),
        _ => unreachable!("unknown method {method}"),
    }
}

/// Every requested method on one hole. With a single explicit method, an
/// inapplicable method is an error; under `all` it is skipped.
pub fn evaluate(
    arith: Arith<'_>,
    hole: &HoleSpec,
    choice: MethodArg,
    tol: &Tolerances,
    terms: usize,
) -> Vec<Outcome> {
    methods(choice)
        .iter()
        .map(|&method| {
            if let Some(why) = inapplicable(method, arith, hole) {
                return if choice == MethodArg::All {
                    Outcome::skipped(method, why)
                } else {
                    Outcome {
                        method,
                        status: Status::Error,
                        result: None,
                        message: Some(why),
                    }
                };
            }
            match arith {
                Arith::Exact(m) => run_method(method, m, hole, tol, terms),
                Arith::Float(m) => run_method(method, m, hole, tol, terms),
                Arith::Parry(m) if method == "spectral" => {
                    let r = escape_rate_parry(m.model(), hole, tol).map(|mut r| {
                        r.diagnostics.notes.push("parry measure: lambda(A) / lambda(B_G)".into());
                        r
                    });
                    Outcome::from(method, r)
                }
                Arith::Parry(m) => run_method(method, m, hole, tol, terms),
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Agree,
    Disagree,
    /// Fewer than two methods produced a value.
    Single,
}

/// Certified methods must agree with each other at `tol.agreement`; the
/// oracle must agree with the first of them at [`ORACLE_AGREEMENT`].
pub fn agreement(outcomes: &[Outcome], tol: &Tolerances) -> (Verdict, Vec<String>) {
    let ok: Vec<&Outcome> = outcomes.iter().filter(|o| o.status == Status::Ok).collect();
    if ok.len() < 2 {
        return (Verdict::Single, Vec::new());
    }
    let mut issues = Vec::new();
    let reference = ok.iter().position(|o| !o.is_oracle());
    for (i, a) in ok.iter().enumerate() {
        for (j, b) in ok.iter().enumerate().skip(i + 1) {
            let limit = match (a.is_oracle(), b.is_oracle()) {
                (false, false) => tol.agreement,
                _ if reference == Some(i) || reference == Some(j) => ORACLE_AGREEMENT,
                _ => continue,
            };
            let (x, y) = (a.result.as_ref().unwrap(), b.result.as_ref().unwrap());
            if !x.agrees_with(y, limit) {
                issues.push(format!(
                    "{} {} vs {} {} (tolerance {limit:e})",
                    a.method, x.exp_rate, b.method, y.exp_rate
                ));
            }
        }
    }
    let verdict = if issues.is_empty() { Verdict::Agree } else { Verdict::Disagree };
    (verdict, issues)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelInfo {
    pub symbols: Vec<String>,
    pub measure: MeasureKind,
    pub mode: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct HoleInfo {
    pub words: Vec<String>,
    pub reduced: Vec<String>,
    pub removed: Vec<String>,
    pub r: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PressureInfo {
    pub closed: Num,
    pub open: Num,
    pub escape_rate: Num,
}

#[derive(Clone, Debug, Serialize)]
pub struct MethodReport {
    pub name: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exp_escape_rate: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub escape_rate: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exp_rate_interval: Option<[Num; 2]>,
    /// Exact endpoints of the certified enclosure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enclosure: Option<[String; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsInfo {
    pub r: usize,
    pub index_size: usize,
    pub theta_bound: Option<Num>,
    pub infinite: bool,
    pub notes: Vec<String>,
}

impl MethodReport {
    pub fn new(o: &Outcome) -> Self {
        let r = o.result.as_ref();
        MethodReport {
            name: o.method,
            status: o.status,
            exp_escape_rate: r.map(|r| Num(r.exp_rate)),
            escape_rate: r.map(|r| Num(r.rate)),
            exp_rate_interval: r.map(|r| [Num(r.exp_rate_lo), Num(r.exp_rate_hi)]),
            enclosure: r
                .and_then(|r| r.enclosure.as_ref())
                .map(|iv| [format_rational(&iv.lo), format_rational(&iv.hi)]),
            certification: r.map(|r| {
                if o.is_oracle() {
                    "estimate"
                } else if r.certified {
                    "certified"
                } else {
                    "uncertified"
                }
            }),
            diagnostics: r.map(|r| DiagnosticsInfo {
                r: r.diagnostics.r,
                index_size: r.diagnostics.index_size,
                theta_bound: r.diagnostics.theta_bound.map(Num),
                infinite: r.diagnostics.infinite,
                notes: r.diagnostics.notes.clone(),
            }),
            message: o.message.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AgreementInfo {
    pub verdict: Verdict,
    pub tolerance: Num,
    pub oracle_tolerance: Num,
    pub issues: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComputeReport {
    pub model: ModelInfo,
    pub hole: HoleInfo,
    pub pressures: Option<PressureInfo>,
    pub methods: Vec<MethodReport>,
    pub agreement: AgreementInfo,
}

impl ComputeReport {
    pub fn disagrees(&self) -> bool {
        self.agreement.verdict == Verdict::Disagree
    }

    pub fn to_json(&self) -> String {
        report::to_json(self)
    }

    pub fn to_text(&self) -> String {
        report::to_text(self)
    }
}

fn pressure_info(arith: Arith<'_>, hole: &HoleSpec, tol: &Tolerances) -> Option<PressureInfo> {
    let p: escape_core::Result<Pressures> = match arith {
        Arith::Exact(m) => pressures(m, hole, tol),
        Arith::Float(m) => pressures(m, hole, tol),
        Arith::Parry(m) => topological_pressures(m.model(), hole, tol),
    };
    p.ok().map(|p| PressureInfo {
        closed: Num(p.closed),
        open: Num(p.open),
        escape_rate: Num(p.rate()),
    })
}

pub fn mode_name(mode: ModeArg) -> &'static str {
    match mode {
        ModeArg::Exact => "exact",
        ModeArg::Float => "float",
    }
}

pub fn run(args: &ComputeArgs) -> Result<ComputeReport, CliError> {
    let tol = args.common.tolerances()?;
    let file = ModelFile::read(&args.model)?;
    let loaded = file.load()?;
    let hole = match &args.hole {
        Some(words) => parse_hole(&loaded.model, words)?,
        None => loaded
            .hole
            .clone()
            .ok_or_else(|| CliError::Parse("hole: the model file has no hole and --hole was not given".into()))?,
    };
    let prepared = Prepared::new(loaded, args.common.mode)?;
    let arith = prepared.arith();
    let model = &prepared.loaded.model;
    let outcomes = evaluate(arith, &hole, args.method, &tol, args.common.oracle_terms);
    if args.method != MethodArg::All {
        if let Some(o) = outcomes.iter().find(|o| o.status == Status::Error) {
            return Err(CliError::Compute(format!(
                "{}: {}",
                o.method,
                o.message.as_deref().unwrap_or("failed")
            )));
        }
    } else if outcomes.iter().all(|o| o.status != Status::Ok) {
        let why: Vec<String> = outcomes
            .iter()
            .filter_map(|o| o.message.as_ref().map(|m| format!("{}: {m}", o.method)))
            .collect();
        return Err(CliError::Compute(why.join("; ")));
    }
    let (verdict, issues) = agreement(&outcomes, &tol);
    Ok(ComputeReport {
        model: ModelInfo {
            symbols: model.symbols().to_vec(),
            measure: prepared.loaded.kind,
            mode: mode_name(arith.mode()),
        },
        hole: HoleInfo {
            words: hole.original().iter().map(|w| model.format_word(w)).collect(),
            reduced: hole.format(model),
            removed: hole.removed().iter().map(|w| model.format_word(w)).collect(),
            r: hole.r(),
        },
        pressures: pressure_info(arith, &hole, &tol),
        methods: outcomes.iter().map(MethodReport::new).collect(),
        agreement: AgreementInfo {
            verdict,
            tolerance: Num(tol.agreement),
            oracle_tolerance: Num(ORACLE_AGREEMENT),
            issues,
        },
    })
}
