use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

use addiviol::conjpair::{scan_violation, violation_report, SingleCopyMin, Verdict};
use addiviol::maxoverlap::SeesawOptions;
use addiviol::minentropy::{screen_subspace, vn_violation_condition, MinEntropyOptions};
use addiviol::multicopy::{
    multicopy_min_search, multicopy_output_entropy, pairing_input, totally_antisymmetric_input, InputKind,
};
use addiviol::subspace::{antisymmetric_subspace, parthasarathy_subspace};
use addiviol::upb::{genericity_check, is_upb_partition_criterion, p0_additivity_report, tiles_upb};
use addiviol::{ProductBasis, RenyiOrder, Subspace};

use crate::report::{emit, write_csv};
use crate::{BasisSelector, CheckArg, Command, Common, InputArg, Selector};

/// A request that is well-formed for the parser but not meaningful.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::error::Error for UsageError {}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Serialize)]
struct Config<'a> {
    #[serde(flatten)]
    command: &'a Command,
    #[serde(flatten)]
    common: &'a Common,
}

impl Common {
    fn min_entropy(&self) -> MinEntropyOptions {
        MinEntropyOptions {
            restarts: self.restarts,
            tol: self.tol,
            max_iter: self.max_iter,
            seed: self.seed,
            rank_eps: self.rank_eps,
        }
    }

    fn seesaw(&self) -> SeesawOptions {
        self.min_entropy().seesaw()
    }
}

fn load_subspace(sel: &Selector, d: Option<usize>) -> anyhow::Result<Subspace> {
    let need_d = || d.ok_or_else(|| usage("--d is required for built-in subspaces"));
    Ok(match sel {
        Selector::Antisym => antisymmetric_subspace(need_d()?)?,
        Selector::Parthasarathy => parthasarathy_subspace(need_d()?)?,
        Selector::File(path) => {
            let text = read(path)?;
            Subspace::from_json(&text).with_context(|| format!("loading subspace {}", path.display()))?
        }
    })
}

fn load_basis(sel: &BasisSelector) -> anyhow::Result<ProductBasis> {
    Ok(match sel {
        BasisSelector::Tiles => tiles_upb(),
        BasisSelector::File(path) => {
            let text = read(path)?;
            ProductBasis::from_json(&text).with_context(|| format!("loading product basis {}", path.display()))?
        }
    })
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

#[derive(Serialize)]
struct ScanRow {
    d: usize,
    lambda_max_exact: f64,
    hayden_bound: f64,
    joint_entropy: f64,
    two_single_min: f64,
    verdict: Verdict,
}

#[derive(Serialize)]
struct ScanSummary {
    p: RenyiOrder,
    d_max: usize,
    minimal_violating_d: Option<usize>,
    rows: Vec<ScanRow>,
}

#[derive(Serialize)]
struct SpectrumRow {
    index: usize,
    lambda: f64,
}

#[derive(Serialize)]
struct SubspaceSummary {
    d_a: usize,
    d_b: usize,
    dim: usize,
    kind: addiviol::subspace::SubspaceKind,
}

#[derive(Serialize)]
struct ScreenResult {
    subspace: SubspaceSummary,
    min_entropy: addiviol::minentropy::MinEntropyResult<f64>,
    /// `2(1 − k/D²)log₂D + h(k/D²)` with `D = d_A`; values above 2 meet
    /// the von Neumann sufficient condition.
    vn_condition: f64,
    vn_condition_exceeds_two: bool,
}

#[derive(Serialize)]
struct UpbResult {
    members: usize,
    d_a: usize,
    d_b: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<addiviol::upb::UpbCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    genericity: Option<addiviol::upb::GenericityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p0_additivity: Option<addiviol::upb::P0AdditivityReport>,
}

/// Runs one command, returning the process exit code.
pub fn run(command: &Command, common: &Common) -> anyhow::Result<u8> {
    let started = Instant::now();
    let config = Config { command, common };
    let out = common.out.as_deref();
    match command {
        Command::Verify { subspace, d, p } => {
            let s = load_subspace(subspace, *d)?;
            let report = violation_report(&s, *p, SingleCopyMin::Auto(common.min_entropy()))?;
            let code = match report.verdict {
                Verdict::Violated => 0,
                Verdict::NotViolated => 1,
                Verdict::Inconclusive => 2,
            };
            emit(&config, common.seed, report, started, out)?;
            Ok(code)
        }
        Command::Scan { p, dmax } => {
            if *dmax < 2 {
                return Err(usage("--dmax must be at least 2"));
            }
            let scan = scan_violation::<f64>(*p, *dmax)?;
            let rows: Vec<ScanRow> = scan
                .reports
                .iter()
                .map(|r| ScanRow {
                    d: r.d,
                    lambda_max_exact: r.lambda_max_exact,
                    hayden_bound: r.hayden_lambda_bound,
                    joint_entropy: r.joint_entropy,
                    two_single_min: 2.0 * r.single_copy_min,
                    verdict: r.verdict,
                })
                .collect();
            if let Some(path) = &common.csv {
                write_csv(path, &rows)?;
            }
            let summary = ScanSummary { p: *p, d_max: *dmax, minimal_violating_d: scan.minimal_violating_d, rows };
            emit(&config, common.seed, summary, started, out)?;
            Ok(0)
        }
        Command::Multicopy { d, n, input, p } => {
            let result = match input {
                InputArg::AntisymTotal => {
                    let k = d * d.saturating_sub(1) / 2;
                    if *n != k {
                        return Err(usage(format!(
                            "the totally antisymmetric input needs n = d(d-1)/2 = {k} copies, got {n}"
                        )));
                    }
                    let state = totally_antisymmetric_input(k)?;
                    multicopy_output_entropy(*d, &state, InputKind::TotallyAntisymmetric, *p, common.large)?
                }
                InputArg::Pairing => {
                    multicopy_output_entropy(*d, &pairing_input(*d, *n)?, InputKind::Pairing, *p, common.large)?
                }
                InputArg::Optimized => multicopy_min_search(*d, *n, *p, &common.seesaw(), common.large)?,
            };
            if let Some(path) = &common.csv {
                let rows = result
                    .spectrum
                    .lambdas()
                    .iter()
                    .enumerate()
                    .map(|(index, &lambda)| SpectrumRow { index, lambda });
                write_csv(path, rows)?;
            }
            emit(&config, common.seed, result, started, out)?;
            Ok(0)
        }
        Command::Upb { basis, check } => {
            let pb = load_basis(basis)?;
            let generic = || -> anyhow::Result<Option<_>> {
                let d = pb.d_a();
                let applicable = pb.d_b() == d && d >= 2 && pb.len() == 2 * (d - 1) + 1;
                Ok(if applicable { Some(genericity_check(&pb, d)?) } else { None })
            };
            let mut result = UpbResult {
                members: pb.len(),
                d_a: pb.d_a(),
                d_b: pb.d_b(),
                certificate: None,
                genericity: None,
                p0_additivity: None,
            };
            match check {
                CheckArg::Partition => {
                    result.certificate = Some(is_upb_partition_criterion(&pb, &common.seesaw())?);
                }
                CheckArg::Genericity => {
                    let d = pb.d_a();
                    result.genericity = Some(genericity_check(&pb, d)?);
                }
                CheckArg::All => {
                    let report = p0_additivity_report(&pb, &common.min_entropy())?;
                    result.certificate = Some(report.certificate.clone());
                    result.genericity = generic()?;
                    result.p0_additivity = Some(report);
                }
            }
            emit(&config, common.seed, result, started, out)?;
            Ok(0)
        }
        Command::Screen { subspace, d, p } => {
            let s = load_subspace(subspace, *d)?;
            let min_entropy = screen_subspace(&s, *p, &common.min_entropy())?;
            let vn_condition = vn_violation_condition::<f64>(s.d_a(), s.dim())?;
            let result = ScreenResult {
                subspace: SubspaceSummary { d_a: s.d_a(), d_b: s.d_b(), dim: s.dim(), kind: s.kind() },
                min_entropy,
                vn_condition,
                vn_condition_exceeds_two: vn_condition > 2.0,
            };
            emit(&config, common.seed, result, started, out)?;
            Ok(0)
        }
    }
}
