//! Exact-arithmetic commands: identity spot checks, graph enumeration,
//! counting tables, and symbolic kernel dumps.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use virial_core::algebra::{
    product_identity_sides, splitting_identity_sides, ConfigFunction, JField, SiteSpace,
};
use virial_core::counting::CountTable;
use virial_core::graph::{
    enumerate_d_with_cap, enumerate_graphs_with_cap, Edge, EdgeRule, GraphFamily,
};
use virial_core::kernel::{
    kernel_by_graphs_with_cap, kernel_by_recurrence_with, kernel_raw_terms, PickRule,
};

use crate::config::RunConfig;
use crate::report::{self, csv_preamble};
use crate::{CliError, CliResult};

fn rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num = rng.gen_range(-9i32..=9);
    let den = rng.gen_range(1i32..=9);
    BigRational::new(num.into(), den.into())
}

fn weight(rng: &mut ChaCha8Rng) -> BigRational {
    let num = rng.gen_range(0i32..=9);
    let den = rng.gen_range(1i32..=9);
    BigRational::new(num.into(), den.into())
}

fn unit(rng: &mut ChaCha8Rng) -> BigRational {
    let den = rng.gen_range(1i32..=9);
    let num = rng.gen_range(0i32..=den);
    BigRational::new(num.into(), den.into())
}

#[derive(Serialize)]
struct AlgebraCheckData {
    cases: usize,
    max_sites: usize,
    splitting_cases: usize,
    product_cases: usize,
    failures: usize,
    ok: bool,
}

/// Runs `cases` random identity instances; returns (splitting, product,
/// failures).
pub fn identity_trials(cases: usize, seed: u64) -> Result<(usize, usize, usize), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut splitting = 0usize;
    let mut product = 0usize;
    let mut failures = 0usize;
    for case in 0..cases {
        let sites = rng.gen_range(1usize..=4);
        let masks = 1u32 << sites;
        let space = SiteSpace::new((0..sites).map(|_| weight(&mut rng)).collect())
            .map_err(CliError::core)?;
        if case % 2 == 0 {
            let h_tab: Vec<BigRational> =
                (0..masks * masks).map(|_| rational(&mut rng)).collect();
            let g_tab: Vec<BigRational> = (0..masks).map(|_| rational(&mut rng)).collect();
            let z = rational(&mut rng);
            let (lhs, rhs) = splitting_identity_sides(
                |xi, gamma| h_tab[(xi * masks + gamma) as usize].clone(),
                |gamma| g_tab[gamma as usize].clone(),
                &space,
                &z,
            );
            if lhs != rhs {
                failures += 1;
            }
            splitting += 1;
        } else {
            let psi1 = ConfigFunction::from_fn(sites, |_| rational(&mut rng))
                .map_err(CliError::core)?;
            let psi2 = ConfigFunction::from_fn(sites, |_| rational(&mut rng))
                .map_err(CliError::core)?;
            let j = JField::new((0..sites).map(|_| unit(&mut rng)).collect())
                .map_err(CliError::core)?;
            let (lhs, rhs) =
                product_identity_sides(&psi1, &psi2, &j, &space).map_err(CliError::core)?;
            if lhs != rhs {
                failures += 1;
            }
            product += 1;
        }
    }
    Ok((splitting, product, failures))
}

pub fn algebra_check(cfg: &RunConfig, cases: usize, seed: u64) -> CliResult {
    let (splitting, product, failures) = identity_trials(cases, seed)?;
    let ok = failures == 0;
    report::print_json(
        "algebra-check",
        cfg.sha256(),
        seed,
        AlgebraCheckData {
            cases,
            max_sites: 4,
            splitting_cases: splitting,
            product_cases: product,
            failures,
            ok,
        },
    );
    if ok {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyArg {
    /// Graphs whose ghost-rooted components stay connected after any
    /// single-vertex removal; the ones the kernel sums over.
    Admissible,
    /// Every graph without white-white edges.
    NoWhiteWhite,
    /// Every graph on the labeled vertices.
    All,
}

#[derive(Serialize)]
struct GraphLine {
    white: u8,
    black: u8,
    edges: Vec<(String, String)>,
}

pub fn graphs_enumerate(cfg: &RunConfig, white: u8, black: u8, family: FamilyArg) -> CliResult {
    let cap = cfg.caps.enumeration;
    let fam: GraphFamily = match family {
        FamilyArg::Admissible => enumerate_d_with_cap(white, black, cap),
        FamilyArg::NoWhiteWhite => {
            enumerate_graphs_with_cap(white, black, EdgeRule::NoWhiteWhite, cap)
        }
        FamilyArg::All => enumerate_graphs_with_cap(white, black, EdgeRule::Unconstrained, cap),
    }
    .map_err(CliError::core)?;
    let mut out = String::new();
    for g in &fam.members {
        let line = GraphLine {
            white,
            black,
            edges: g.edge_labels(),
        };
        out.push_str(&serde_json::to_string(&line).expect("graph line serializes"));
        out.push('\n');
    }
    report::print_text(&out);
    Ok(())
}

pub fn counts(cfg: &RunConfig, max_m: u32, max_n: u32, linear: bool) -> CliResult {
    let mut table = CountTable::new(cfg.caps.order);
    let mut out = csv_preamble("counts", &cfg.sha256(), cfg.seed);
    out.push_str("m,n,count\n");
    for m in 0..=max_m {
        for n in 0..=max_n {
            let value = if linear {
                table.linear_by_recurrence(m, n)
            } else {
                table.full(m, n)
            }
            .map_err(CliError::core)?;
            out.push_str(&format!("{m},{n},{value}\n"));
        }
    }
    report::print_text(&out);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum MethodArg {
    #[default]
    Recurrence,
    Graphs,
}

fn edge_labels(edges: &[Edge]) -> Vec<(String, String)> {
    edges
        .iter()
        .map(|e| {
            let (a, b) = e.ends();
            (a.to_string(), b.to_string())
        })
        .collect()
}

#[derive(Serialize)]
struct CancelledTerm {
    numerator: String,
    denominator: String,
    edges: Vec<(String, String)>,
}

#[derive(Serialize)]
struct RawTermOut {
    sign: i64,
    edges: Vec<(String, String)>,
    boltzmann_pairs: Vec<(String, String)>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum TermList {
    Cancelled(Vec<CancelledTerm>),
    Raw(Vec<RawTermOut>),
}

#[derive(Serialize)]
struct KernelData {
    white: u8,
    black: u8,
    method: String,
    cancelled: bool,
    term_count: usize,
    /// Exponent of the density prefactor in front of the term sum.
    density_exponent: u32,
    terms: TermList,
}

pub fn kernel(
    cfg: &RunConfig,
    white: u8,
    black: u8,
    method: MethodArg,
    no_cancel: bool,
) -> CliResult {
    let cap = cfg.caps.symbolic;
    let data = if no_cancel {
        if method == MethodArg::Graphs {
            return Err(CliError::Runtime(
                "--no-cancel only applies to the recurrence method".into(),
            ));
        }
        let raw = kernel_raw_terms(white, black, cap).map_err(CliError::core)?;
        KernelData {
            white,
            black,
            method: "recurrence".into(),
            cancelled: false,
            term_count: raw.len(),
            density_exponent: white as u32 + black as u32,
            terms: TermList::Raw(
                raw.iter()
                    .map(|t| RawTermOut {
                        sign: t.sign,
                        edges: edge_labels(&t.edges),
                        boltzmann_pairs: edge_labels(&t.boltzmann_pairs),
                    })
                    .collect(),
            ),
        }
    } else {
        let k = match method {
            MethodArg::Recurrence => {
                kernel_by_recurrence_with(white, black, PickRule::Lowest, cap)
            }
            MethodArg::Graphs => kernel_by_graphs_with_cap(white, black, cap),
        }
        .map_err(CliError::core)?;
        KernelData {
            white,
            black,
            method: match method {
                MethodArg::Recurrence => "recurrence".into(),
                MethodArg::Graphs => "graphs".into(),
            },
            cancelled: true,
            term_count: k.terms().len(),
            density_exponent: k.prefactor_exponent(),
            terms: TermList::Cancelled(
                k.terms()
                    .iter()
                    .map(|t| CancelledTerm {
                        numerator: t.coefficient.numer().to_string(),
                        denominator: t.coefficient.denom().to_string(),
                        edges: edge_labels(&t.edges),
                    })
                    .collect(),
            ),
        }
    };
    report::print_json("kernel", cfg.sha256(), cfg.seed, data);
    Ok(())
}
