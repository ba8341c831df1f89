use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use boolcube::alpha::alpha;
use boolcube::cubes::{
    bprime_bound_check, bprime_search_mode, contains_affine_cube, correspondence_check,
    BPrimeBoundReport, CubeMode, CubeWitness, IntSet,
};
use boolcube::extraction::{above_threshold, extract_bd, Extraction, TraceLevel};
use boolcube::io::{parse_coloring, parse_family, parse_int_set};
use boolcube::lattice::{contains_bd, level_family};
use boolcube::lubell::{format_rational, lubell};
use boolcube::ramsey::{monochromatic_extract, rainbow_search, verify_r_s_1, CheckStatus};
use boolcube::search::{
    bound_audit, max_bd_free_with, AuditReport, Objective, SearchOptions, SearchResult,
};
use boolcube::selftest::{run_selftest, SelftestContext, SuiteResult};
use boolcube::{AlgebraWitness, BoundedReal, SetFamily, SubsetCode, Verdict};
use serde::Serialize;

use crate::cli::ObjectiveArg;
use crate::output::{Report, Status};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_family(path: &Path) -> Result<SetFamily> {
    parse_family(&read(path)?).with_context(|| format!("invalid family file {}", path.display()))
}

fn sets(codes: &[SubsetCode]) -> String {
    let parts: Vec<String> = codes.iter().map(|c| set(*c)).collect();
    parts.join(" ")
}

fn set(c: SubsetCode) -> String {
    let e: Vec<String> = c.elements().iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", e.join(","))
}

fn witness_text(w: &AlgebraWitness) -> String {
    format!("x0={} atoms={}", set(w.x0), sets(&w.atoms))
}

fn enclosure_text(b: &BoundedReal) -> String {
    let digits = boolcube::real::significant_digits(b.precision());
    format!("[{}, {}]", b.lo_decimal(digits), b.hi_decimal(digits))
}

#[derive(Serialize)]
struct AlphaOut {
    d: usize,
    n: u64,
    alpha: BoundedReal,
}

pub fn alpha_cmd(d: usize, n: u64, precision: f64) -> Result<Report> {
    if !(precision > 0.0 && precision.is_finite()) {
        return Err(boolcube::Error::InvalidInput(format!(
            "precision must be positive, got {precision}"
        ))
        .into());
    }
    let a = alpha(d, n, precision)?;
    let text = enclosure_text(&a);
    Report::new(&AlphaOut { d, n, alpha: a }, text, Status::Ok)
}

#[derive(Serialize)]
struct LubellOut {
    n: usize,
    size: usize,
    lubell: String,
}

pub fn lubell_cmd(input: &Path) -> Result<Report> {
    let f = load_family(input)?;
    let h = format_rational(&lubell(&f));
    let text = h.clone();
    Report::new(
        &LubellOut {
            n: f.n(),
            size: f.len(),
            lubell: h,
        },
        text,
        Status::Ok,
    )
}

#[derive(Serialize)]
struct DetectOut {
    n: usize,
    d: usize,
    contains: bool,
    witness: Option<AlgebraWitness>,
}

pub fn detect_cmd(input: &Path, d: usize) -> Result<Report> {
    let f = load_family(input)?;
    let w = contains_bd(&f, d)?;
    let (text, status) = match &w {
        Some(w) => (format!("contains B_{d}: {}", witness_text(w)), Status::Ok),
        None => (format!("no B_{d}"), Status::NotFound),
    };
    Report::new(
        &DetectOut {
            n: f.n(),
            d,
            contains: w.is_some(),
            witness: w,
        },
        text,
        status,
    )
}

#[derive(Serialize)]
struct ExtractOut {
    n: usize,
    d: usize,
    status: &'static str,
    lubell: String,
    threshold: BoundedReal,
    above_threshold: bool,
    x0: Option<SubsetCode>,
    atoms: Option<Vec<SubsetCode>>,
    trace: Vec<TraceLevel>,
}

pub fn extract_cmd(input: &Path, d: usize) -> Result<Report> {
    let f = load_family(input)?;
    let threshold = alpha(d, f.n() as u64, boolcube::real::DEFAULT_PRECISION)?;
    let above = above_threshold(&f, d)?;
    let h = format_rational(&lubell(&f));
    let mut out = ExtractOut {
        n: f.n(),
        d,
        status: "not_found",
        lubell: h,
        threshold,
        above_threshold: above,
        x0: None,
        atoms: None,
        trace: Vec::new(),
    };
    let (text, status) = match extract_bd(&f, d)? {
        Extraction::Found { witness, trace } => {
            let text = witness_text(&witness);
            out.status = "found";
            out.x0 = Some(witness.x0);
            out.atoms = Some(witness.atoms);
            out.trace = trace.levels;
            (text, Status::Ok)
        }
        Extraction::NotFound => ("not found".to_string(), Status::NotFound),
        Extraction::Indeterminate => {
            out.status = "indeterminate";
            (
                "undecided at finest precision".to_string(),
                Status::Undecided,
            )
        }
    };
    Report::new(&out, text, status)
}

#[derive(Serialize)]
struct SearchOut {
    #[serde(flatten)]
    result: SearchResult,
    audit: Option<AuditReport>,
}

pub fn search_cmd(
    n: usize,
    d: usize,
    objective: ObjectiveArg,
    budget: u64,
    sequential: bool,
) -> Result<Report> {
    let objective = match objective {
        ObjectiveArg::Cardinality => Objective::Cardinality,
        ObjectiveArg::Lubell => Objective::Lubell,
    };
    let options = SearchOptions {
        budget,
        parallel: !sequential,
    };
    let result = max_bd_free_with(n, d, objective, &options)?;
    let audit = if result.exact {
        Some(bound_audit(n, d, &result)?)
    } else {
        None
    };
    let status = match &audit {
        None => Status::Undecided,
        Some(a) if a.rows.iter().any(|r| r.verdict == Verdict::Fails) => Status::NotFound,
        Some(a) if a.all_hold() => Status::Ok,
        Some(_) => Status::Undecided,
    };
    let text = format!(
        "{objective} {} ({}), witness: {}",
        format_rational(&result.value),
        if result.exact { "exact" } else { "lower bound" },
        sets(result.witness.members())
    );
    Report::new(&SearchOut { result, audit }, text, status)
}

#[derive(Serialize)]
struct CubeFreeOut {
    n: u64,
    d: usize,
    mode: CubeMode,
    size: usize,
    witness: Vec<u64>,
    exact: bool,
    nodes_explored: u64,
    bound: Option<BPrimeBoundReport>,
}

pub fn cube_free_cmd(n: u64, d: usize, budget: u64, strict: bool) -> Result<Report> {
    let mode = if strict {
        CubeMode::StrictDistinct
    } else {
        CubeMode::Literal
    };
    let r = bprime_search_mode(n, d, budget, mode)?;
    let bound = if r.exact {
        Some(bprime_bound_check(n, d, r.size as u64, None)?)
    } else {
        None
    };
    let status = match &bound {
        None => Status::Undecided,
        Some(b) => match b.closed_form {
            Verdict::Holds => Status::Ok,
            Verdict::Fails => Status::NotFound,
            Verdict::Indeterminate => Status::Undecided,
        },
    };
    let text = format!(
        "b'({n},{d}) {} {} witness {:?}",
        if r.exact { "=" } else { ">=" },
        r.size,
        r.witness.elements()
    );
    Report::new(
        &CubeFreeOut {
            n,
            d,
            mode,
            size: r.size,
            witness: r.witness.elements().to_vec(),
            exact: r.exact,
            nodes_explored: r.nodes,
            bound,
        },
        text,
        status,
    )
}

#[derive(Serialize)]
struct CorrespondenceOne {
    n: u64,
    d: usize,
    fints: Vec<u64>,
    cube: Option<CubeWitness>,
    algebra: Option<AlgebraWitness>,
    agree: bool,
}

#[derive(Serialize)]
struct CorrespondenceAll {
    n: u64,
    d: usize,
    checked: u64,
    disagreements: Vec<Vec<u64>>,
}

pub fn correspondence_cmd(input: Option<&Path>, n: Option<u64>, d: usize) -> Result<Report> {
    if let Some(path) = input {
        let h = parse_int_set(&read(path)?)
            .with_context(|| format!("invalid integer-set file {}", path.display()))?;
        let agree = correspondence_check(&h, h.n() as usize, d)?;
        let cube = contains_affine_cube(&h, d);
        let algebra = contains_bd(&level_family(&h.levels(), h.n() as usize)?, d)?;
        let text = format!(
            "cube: {}, algebra: {}, {}",
            if cube.is_some() { "yes" } else { "no" },
            if algebra.is_some() { "yes" } else { "no" },
            if agree { "agree" } else { "DISAGREE" }
        );
        let out = CorrespondenceOne {
            n: h.n(),
            d,
            fints: h.elements().to_vec(),
            cube,
            algebra,
            agree,
        };
        return Report::new(
            &out,
            text,
            if agree { Status::Ok } else { Status::NotFound },
        );
    }
    let n = n.expect("clap requires --input or --n");
    if n >= 63 {
        return Err(
            boolcube::Error::BudgetExceeded(format!("n = {n} is too large to sweep")).into(),
        );
    }
    let mut checked = 0;
    let mut disagreements = Vec::new();
    for mask in 0..1u64 << (n + 1) {
        let h = IntSet::from_mask(n, mask);
        checked += 1;
        if !correspondence_check(&h, n as usize, d)? {
            disagreements.push(h.elements().to_vec());
        }
    }
    let ok = disagreements.is_empty();
    let text = format!(
        "{checked} sets checked, {} disagreements",
        disagreements.len()
    );
    Report::new(
        &CorrespondenceAll {
            n,
            d,
            checked,
            disagreements,
        },
        text,
        if ok { Status::Ok } else { Status::NotFound },
    )
}

pub fn ramsey_verify_rs1_cmd(s: usize, limit: u128) -> Result<Report> {
    let rep = verify_r_s_1(s, limit)?;
    let status = if rep.construction.is_violated() || rep.upper_bound.is_violated() {
        Status::NotFound
    } else if rep.established {
        Status::Ok
    } else {
        Status::Undecided
    };
    let describe = |c: &CheckStatus| match c {
        CheckStatus::Verified { checked } => format!("verified ({checked} colorings)"),
        CheckStatus::Violated { .. } => "violated".to_string(),
        CheckStatus::Skipped { reason } => format!("skipped: {reason}"),
    };
    let text = format!(
        "construction at n={}: {}\nupper bound at n={}: {}\nR(B_{s},B_1) = {}: {}",
        rep.construction_n,
        describe(&rep.construction),
        rep.upper_bound_n,
        describe(&rep.upper_bound),
        2 * s,
        if rep.established {
            "established"
        } else {
            "not established"
        }
    );
    Report::new(&rep, text, status)
}

pub fn ramsey_extract_cmd(input: &Path, d: usize) -> Result<Report> {
    let c = parse_coloring(&read(input)?)
        .with_context(|| format!("invalid coloring file {}", input.display()))?;
    let rep = monochromatic_extract(&c, d)?;
    let (text, status) = match (&rep.color, &rep.witness) {
        (Some(color), Some(w)) => (format!("color {color}: {}", witness_text(w)), Status::Ok),
        _ => (
            "no color class clears the threshold".to_string(),
            Status::NotFound,
        ),
    };
    Report::new(&rep, text, status)
}

pub fn ramsey_rainbow_cmd(input: &Path, r: usize, trials: u64, seed: u64) -> Result<Report> {
    let c = parse_coloring(&read(input)?)
        .with_context(|| format!("invalid coloring file {}", input.display()))?;
    let out = rainbow_search(&c, r, trials, seed)?;
    let (text, status) = match &out.witness {
        Some(w) => (
            format!(
                "rainbow B_{r} at trial {}: {}",
                out.trial.unwrap_or(0),
                witness_text(w)
            ),
            Status::Ok,
        ),
        None => (
            format!("none in {} trials", out.trials_run),
            Status::NotFound,
        ),
    };
    Report::new(&out, text, status)
}

#[derive(Serialize)]
struct SelftestOut {
    passed: bool,
    suites: Vec<SuiteResult>,
}

pub fn selftest_cmd(suite: Option<&str>) -> Result<Report> {
    let suites = run_selftest(suite, &SelftestContext::default())?;
    let passed = suites.iter().all(|s| s.passed);
    let text = suites
        .iter()
        .map(|s| {
            format!(
                "{} {} ({} checks)",
                if s.passed { "PASS" } else { "FAIL" },
                s.suite,
                s.checks
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Report::new(
        &SelftestOut { passed, suites },
        text,
        if passed { Status::Ok } else { Status::NotFound },
    )
}
