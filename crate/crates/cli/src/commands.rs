//! Subcommand implementations and the exit-code contract.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use orthoising::dynamics::{
    self, evolve_adiabatic, gap_scan, sample_shots, success_probability, AdiabaticRunConfig, GapPoint,
    SuccessReport, TransverseFieldHamiltonian, MAX_SIM_SITES,
};
use orthoising::embedding::{embed, validate_embedding, EmbedError, EmbeddingReport, GridBudget, OrthogonalEmbedding};
use orthoising::graph::{mis_oracle, parse_graph, validate_cubic_planar, GraphError, IndependentSetWitness, ValidationReport};
use orthoising::hamiltonian::{
    build_lattice_hamiltonian, check_correspondence, gap_upper_bound_check, CorrespondenceReport, DiagonalIsing,
    GapReport, LatticeHamiltonian, DEFAULT_SITE_LIMIT,
};
use orthoising::pulse::{compile_schedule, verify_schedule as verify, PulseSchedule, ScheduleReport};
use orthoising::reduction::{build_hp, mis_from_ground_energy};
use orthoising::Graph;

use crate::artifacts::{sha256_hex, to_json, RunDir};

/// Gap scans above this many sites take minutes per point, so `solve` skips them.
const SOLVE_GAP_SITES: usize = 10;

#[derive(Debug)]
pub enum Failure {
    /// Invalid input or a failed check.
    Invalid(String),
    Io(String),
    Embedding(String),
    Capacity(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 2,
            Failure::Embedding(_) => 3,
            Failure::Capacity(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Io(m) | Failure::Embedding(m) | Failure::Capacity(m) => m,
        }
    }
}

pub struct BuildOptions {
    pub c: i64,
    pub budget: Option<String>,
    pub oracle_limit: usize,
}

pub struct RunOptions {
    pub total_time: f64,
    pub dt: Option<f64>,
    pub seed: u64,
    pub shots: usize,
    pub gap_points: usize,
    pub dump_amplitudes: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {}", path.display(), e)))
}

struct Input {
    graph: Graph,
    sha256: String,
}

fn load_graph(path: &Path) -> Result<Input, Failure> {
    let text = read(path)?;
    let graph = parse_graph(&text).map_err(|e| Failure::Invalid(format!("{}: {}", path.display(), e)))?;
    Ok(Input { graph, sha256: sha256_hex(text.as_bytes()) })
}

fn require_valid(g: &Graph) -> Result<ValidationReport, Failure> {
    let report = validate_cubic_planar(g);
    if report.passes() {
        Ok(report)
    } else {
        let list: Vec<String> = report.violations.iter().map(|v| format!("{}: {}", v.code, v.message)).collect();
        Err(Failure::Invalid(format!("graph is not cubic planar\n  {}", list.join("\n  "))))
    }
}

/// `RxC`, `R×C` or `N` (square).
pub fn parse_budget(text: &str) -> Result<GridBudget, Failure> {
    let bad = || Failure::Invalid(format!("budget {:?}: expected ROWSxCOLS or N", text));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(['x', 'X', '×']).collect();
    let budget = match parts.as_slice() {
        [n] => GridBudget::square(num(n)?),
        [r, c] => GridBudget { rows: num(r)?, cols: num(c)? },
        _ => return Err(bad()),
    };
    if budget.rows == 0 || budget.cols == 0 {
        return Err(bad());
    }
    Ok(budget)
}

fn embed_graph(g: &Graph, budget: Option<&str>) -> Result<OrthogonalEmbedding, Failure> {
    let budget = match budget {
        Some(b) => parse_budget(b)?,
        None => GridBudget::for_graph(g),
    };
    embed(g, budget).map_err(|e| match e {
        EmbedError::NonPlanar { .. } => Failure::Embedding(format!("NonPlanar: {}", e)),
        EmbedError::BudgetExceeded { .. } => Failure::Embedding(format!("BudgetExceeded: {}", e)),
        _ => Failure::Embedding(e.to_string()),
    })
}

fn oracle_result(g: &Graph, limit: usize) -> Result<IndependentSetWitness, Failure> {
    mis_oracle(g, limit).map_err(|e| match e {
        GraphError::TooLarge { .. } => Failure::Capacity(e.to_string()),
        _ => Failure::Invalid(e.to_string()),
    })
}

pub fn validate(path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let input = load_graph(path)?;
    let report = validate_cubic_planar(&input.graph);
    print!("{}", to_json(&report));
    if let Some(dir) = out {
        let mut run = RunDir::new(dir);
        run.add_json("validation.json", &report);
        run.finish()?;
    }
    require_valid(&input.graph).map(|_| ())
}

pub fn oracle(path: &Path, limit: usize) -> Result<(), Failure> {
    let input = load_graph(path)?;
    println!("{}", oracle_result(&input.graph, limit)?);
    Ok(())
}

#[derive(Serialize)]
struct EmbeddingStats {
    grid_rows: usize,
    grid_cols: usize,
    used_sites: usize,
    dummy_sites: usize,
    /// Whether the drawing also fits the compact `⌊n/2⌋ × ⌊n/2⌋` grid; informational only.
    within_half_n_grid: bool,
    report: EmbeddingReport,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

#[derive(Serialize)]
struct CompileReport {
    input_sha256: String,
    n: usize,
    edges: usize,
    c: i64,
    validation: ValidationReport,
    embedding: EmbeddingStats,
    lattice_sites: usize,
    ferromagnetic_bonds: usize,
    oracle: Option<IndependentSetWitness>,
    correspondence: Option<CorrespondenceReport>,
    gap: Option<GapReport>,
    schedule: ScheduleReport,
    checks: Vec<Check>,
    passed: bool,
}

pub fn compile(path: &Path, opts: &BuildOptions, out: &Path) -> Result<(), Failure> {
    let input = load_graph(path)?;
    let g = &input.graph;
    let validation = require_valid(g)?;
    let emb = embed_graph(g, opts.budget.as_deref())?;
    let h = build_lattice_hamiltonian(&emb, opts.c).map_err(|e| Failure::Invalid(e.to_string()))?;
    let hp = build_hp(g).map_err(|e| Failure::Invalid(e.to_string()))?;
    let schedule = compile_schedule(&h).map_err(|e| Failure::Invalid(e.to_string()))?;

    let mut checks = Vec::new();
    let emb_report = validate_embedding(g, &emb);
    checks.push(Check {
        name: "embedding",
        passed: emb_report.is_valid(),
        detail: format!("{} violations", emb_report.violations.len()),
    });
    let half = g.n() / 2;
    let embedding = EmbeddingStats {
        grid_rows: emb.grid_rows,
        grid_cols: emb.grid_cols,
        used_sites: emb.used_sites(),
        dummy_sites: emb.dummies().len(),
        within_half_n_grid: emb.grid_rows <= half && emb.grid_cols <= half,
        report: emb_report,
    };

    let oracle = mis_oracle(g, opts.oracle_limit).ok();
    let small_problem = g.n() <= DEFAULT_SITE_LIMIT;
    let gap = small_problem.then(|| gap_upper_bound_check(g, &hp));
    if let Some(r) = &gap {
        checks.push(Check {
            name: "gap-bound",
            passed: r.gap_within_bound && r.flips_within_bound,
            detail: format!("gap {:?}, largest ground-state flip {}", r.gap, r.max_flip_delta),
        });
        if let Some(w) = &oracle {
            let v = mis_from_ground_energy(g, r.e_min).ok();
            checks.push(Check {
                name: "ground-energy-matches-oracle",
                passed: v == Some(w.cardinality),
                detail: format!("ground energy {} gives {:?}, oracle {}", r.e_min, v, w.cardinality),
            });
        }
    }
    let correspondence = (h.site_count() <= DEFAULT_SITE_LIMIT).then(|| check_correspondence(g, &hp, &h));
    if let Some(r) = &correspondence {
        checks.push(Check {
            name: "correspondence-ground",
            passed: r.ground_ok(),
            detail: format!("{} sites, shift c*F = {}", r.lattice_sites, r.c * r.ferromagnetic_bonds as i64),
        });
        // Excited states are only faithful once c dominates the vertex terms.
        if h.c >= 9 {
            checks.push(Check {
                name: "correspondence-first-excited",
                passed: r.first_excited_ok(),
                detail: match (&r.first_excited, &r.note) {
                    (Some(l), _) => format!(
                        "lattice level {} x{}, problem level {} x{}",
                        l.lattice_energy, l.lattice_degeneracy, l.problem_energy, l.problem_degeneracy
                    ),
                    (None, note) => note.clone().unwrap_or_default(),
                },
            });
        }
    }
    let schedule_report = verify(&schedule, &h);
    checks.push(Check { name: "schedule", passed: schedule_report.passes(), detail: schedule_report.summary() });
    let passed = checks.iter().all(|c| c.passed);

    let report = CompileReport {
        input_sha256: input.sha256,
        n: g.n(),
        edges: g.edge_count(),
        c: h.c,
        validation,
        embedding,
        lattice_sites: h.site_count(),
        ferromagnetic_bonds: h.ferromagnetic_bonds(),
        oracle,
        correspondence,
        gap,
        schedule: schedule_report,
        checks,
        passed,
    };
    let mut run = RunDir::new(out);
    run.add("embedding.json", emb.to_json());
    run.add("hamiltonian.json", h.to_json());
    run.add("schedule.json", schedule.to_json());
    run.add_json("report.json", &report);
    run.finish()?;

    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {}", out.display());
    if passed {
        Ok(())
    } else {
        Err(Failure::Invalid("one or more checks failed".into()))
    }
}

#[derive(Serialize)]
struct RunConfigEcho {
    input_sha256: String,
    c: i64,
    total_time: f64,
    dt: f64,
    steps: usize,
    seed: u64,
    shots: usize,
}

#[derive(Serialize)]
struct ShotSummary {
    /// Lattice bitstrings, site 0 first, with their counts.
    outcomes: BTreeMap<String, usize>,
    /// Decoded independent sets with their counts.
    decoded: BTreeMap<String, usize>,
    best_cardinality: usize,
    hits: usize,
    hit_fraction: f64,
}

#[derive(Serialize)]
struct SolveReport {
    config: RunConfigEcho,
    lattice_sites: usize,
    oracle: IndependentSetWitness,
    success: SuccessReport,
    final_norm: f64,
    shots: ShotSummary,
    recovered_mis_size: usize,
    recovered_matches_oracle: bool,
    gap_scan: Vec<GapPoint>,
    gap_scan_note: Option<String>,
}

pub fn solve(path: &Path, opts: &BuildOptions, run: &RunOptions, out: &Path) -> Result<(), Failure> {
    let input = load_graph(path)?;
    let g = &input.graph;
    require_valid(g)?;
    let emb = embed_graph(g, opts.budget.as_deref())?;
    let h = build_lattice_hamiltonian(&emb, opts.c).map_err(|e| Failure::Invalid(e.to_string()))?;
    let n = h.site_count();
    if n > MAX_SIM_SITES {
        return Err(Failure::Capacity(format!("{} lattice sites exceed the simulator limit of {}", n, MAX_SIM_SITES)));
    }
    let oracle = oracle_result(g, opts.oracle_limit)?;
    let mut cfg = AdiabaticRunConfig::new(run.total_time, run.seed);
    if let Some(dt) = run.dt {
        cfg = cfg.with_dt(dt);
    }
    cfg.validate().map_err(|e| Failure::Invalid(e.to_string()))?;

    let hb = TransverseFieldHamiltonian::new(n);
    let state = evolve_adiabatic::<f64>(&hb, &h, &cfg).map_err(sim_failure)?;
    let success = success_probability(&state, g, &h, oracle.cardinality).map_err(sim_failure)?;

    let mut outcomes = BTreeMap::new();
    let mut decoded = BTreeMap::new();
    let mut best = 0;
    let mut hits = 0;
    for x in sample_shots(&state, run.seed, run.shots) {
        let bits: String = (0..n).map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect();
        *outcomes.entry(bits).or_insert(0) += 1;
        let set = dynamics::decode(g, &h, x);
        let members: Vec<String> = set.members().iter().map(|v| v.to_string()).collect();
        *decoded.entry(format!("{}: {{{}}}", set.cardinality(), members.join(", "))).or_insert(0) += 1;
        best = best.max(set.cardinality());
        if set.cardinality() == oracle.cardinality {
            hits += 1;
        }
    }

    let (gap_points, gap_scan_note) = if run.gap_points == 0 {
        (Vec::new(), Some("disabled".into()))
    } else if n > SOLVE_GAP_SITES {
        (Vec::new(), Some(format!("skipped: {} sites exceed {}", n, SOLVE_GAP_SITES)))
    } else {
        let grid: Vec<f64> = if run.gap_points == 1 {
            vec![1.0]
        } else {
            (0..run.gap_points).map(|k| k as f64 / (run.gap_points - 1) as f64).collect()
        };
        (gap_scan(&hb, &DiagonalIsing::from_lattice(&h), &grid).map_err(sim_failure)?, None)
    };

    let report = SolveReport {
        config: RunConfigEcho {
            input_sha256: input.sha256,
            c: h.c,
            total_time: cfg.total_time,
            dt: cfg.dt,
            steps: cfg.steps(),
            seed: cfg.seed,
            shots: run.shots,
        },
        lattice_sites: n,
        success,
        final_norm: state.norm_sqr(),
        shots: ShotSummary {
            outcomes,
            decoded,
            best_cardinality: best,
            hits,
            hit_fraction: if run.shots == 0 { 0.0 } else { hits as f64 / run.shots as f64 },
        },
        recovered_mis_size: best,
        recovered_matches_oracle: best == oracle.cardinality,
        oracle,
        gap_scan: gap_points,
        gap_scan_note,
    };
    let mut dir = RunDir::new(out);
    dir.add_json("run.json", &report);
    if run.dump_amplitudes {
        dir.add("amplitudes.bin", state.to_le_bytes());
    }
    dir.finish()?;

    println!("success probability: {:.6}", report.success.probability);
    println!(
        "recovered MIS size: {} (oracle {}), {}/{} shots",
        report.recovered_mis_size, report.oracle.cardinality, report.shots.hits, run.shots
    );
    println!("wrote {}", out.display());
    Ok(())
}

fn sim_failure(e: dynamics::DynamicsError) -> Failure {
    match e {
        dynamics::DynamicsError::TooManySites { .. } => Failure::Capacity(e.to_string()),
        _ => Failure::Invalid(e.to_string()),
    }
}

pub fn verify_schedule(schedule: &Path, hamiltonian: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let s_text = read(schedule)?;
    let h_text = read(hamiltonian)?;
    let s = PulseSchedule::from_json(&s_text).map_err(|e| Failure::Invalid(format!("{}: {}", schedule.display(), e)))?;
    let h = LatticeHamiltonian::from_json(&h_text)
        .map_err(|e| Failure::Invalid(format!("{}: {}", hamiltonian.display(), e)))?;
    let report = verify(&s, &h);
    let text = to_json(&report);
    match out {
        Some(p) => fs::write(p, &text).map_err(|e| Failure::Io(format!("cannot write {}: {}", p.display(), e)))?,
        None => print!("{}", text),
    }
    if report.passes() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("schedule does not reproduce the Hamiltonian: {}", report.summary())))
    }
}
