//! Command-line front end. Every command writes one JSON document.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::annulus_trace::{independence_check, AnnulusContext};
use crate::biangle_counit::{check_collected_identity, sorted_admissible_patterns, CounitConstants};
use crate::braid_reduction::{
    verify_p_closed_form, BraidWord, Reducer, SkeinConstants, Strategy,
};
use crate::error::{invalid, Error, Result};
use crate::fg_matrices::{check_diagonal_lemma, left_matrix, right_matrix};
use crate::quantum_torus::{Torus, TorusElement};
use crate::scalars::RingContext;
use crate::tropical_fan::{
    annulus_fan_points, fan_membership, glued_pairs_are_generated, hilbert_basis, rhombus,
    tropical_t, Side, TriangleFunction,
};

pub const SCHEMA: &str = "1";

#[derive(Debug, Parser)]
#[command(name = "annular-skein", version, about = "SL(n) skein computations on the annulus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print a plain-text table instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Co-unit constants table (JSON).
    #[arg(long, global = true)]
    pub constants: Option<PathBuf>,
    /// Skein relation constants (JSON).
    #[arg(long, global = true)]
    pub skein_constants: Option<PathBuf>,
    /// Worker threads for the state sums.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Leftmost,
    Rightmost,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum trace of a basis web, a monomial in them, or the simple loop.
    Qtrace {
        #[arg(long)]
        n: u32,
        /// `B1`, `B2`, ...
        #[arg(long, conflicts_with_all = ["powers", "loop_"])]
        web: Option<String>,
        /// Exponents `m1,m2,...` of `B_1^{m1} B_2^{m2} ⋯`.
        #[arg(long)]
        powers: Option<String>,
        #[arg(long = "loop")]
        loop_: bool,
    },
    /// Injectivity of the tropical degree map and the T-matrix inverse.
    Independence {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        max_total: u32,
    },
    /// The quantum left and right matrices and the diagonal-entry checks.
    Matrices {
        #[arg(long)]
        n: u32,
    },
    /// Tropical functions, rhombus numbers, Hilbert basis, annulus fan points.
    Fan {
        #[arg(long)]
        n: u32,
        /// A triangle function to classify (JSON `{"n":..,"values":{"a,b,c":v}}`).
        #[arg(long)]
        function: Option<PathBuf>,
        /// Enumerate the Hilbert basis with this value bound.
        #[arg(long)]
        hilbert_bound: Option<u32>,
        /// List the annulus fan points with `Σ m_k` up to this total.
        #[arg(long)]
        points: Option<u32>,
    },
    /// Reduce a braid closure to a polynomial in the power knots.
    Reduce {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        strands: u32,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, value_enum, default_value = "leftmost")]
        strategy: StrategyArg,
    },
    /// The polynomial `P_i`, its closed form and its roots.
    Pbeta {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        i: u32,
    },
    /// Run every invariant suite for one rank.
    Selftest {
        #[arg(long)]
        n: u32,
    },
}

/// Result of a command: the JSON document and whether every check held.
pub struct Outcome {
    pub value: Value,
    pub verified: bool,
}

fn check_n(n: u32) -> Result<()> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    Ok(())
}

fn counit_constants(path: &Option<PathBuf>) -> Result<CounitConstants> {
    match path {
        Some(p) => CounitConstants::from_json_file(p),
        None => Ok(CounitConstants::default()),
    }
}

fn skein_constants(ctx: RingContext, path: &Option<PathBuf>) -> Result<SkeinConstants> {
    match path {
        Some(p) => SkeinConstants::from_json_file(p),
        None => Ok(SkeinConstants::standard(ctx)),
    }
}

fn parse_web(web: &str) -> Result<u32> {
    web.trim()
        .strip_prefix(['B', 'b'])
        .and_then(|k| k.parse().ok())
        .ok_or_else(|| invalid(format!("expected a web like B2, got {web:?}")))
}

fn parse_powers(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|_| invalid(format!("bad exponent {s:?}"))))
        .collect()
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Qtrace { n, web, powers, loop_ } => {
            check_n(*n)?;
            let ctx = AnnulusContext::new(*n)?
                .with_counit(counit_constants(&cli.constants)?)
                .with_threads(cli.threads);
            if *loop_ {
                let rep = ctx.trace_simple_loop()?;
                let ones = rep.all_coefficients_one();
                return Ok(Outcome {
                    value: json!({ "command": "qtrace", "n": n, "target": "loop", "all_coefficients_one": ones, "report": rep }),
                    verified: ones,
                });
            }
            let m: Vec<u32> = match (web, powers) {
                (Some(w), None) => {
                    let k = parse_web(w)?;
                    if k == 0 || k >= *n {
                        return Err(invalid(format!("B{k} needs 1 ≤ k ≤ {}", n - 1)));
                    }
                    (1..*n).map(|j| (j == k) as u32).collect()
                }
                (None, Some(p)) => parse_powers(p)?,
                _ => return Err(invalid("give exactly one of --web, --powers, --loop")),
            };
            if m.len() != (*n - 1) as usize {
                return Err(invalid(format!("expected {} exponents", n - 1)));
            }
            let rep = ctx.trace_monomial(&m)?;
            let mut want = None;
            for (k, mk) in m.iter().enumerate() {
                let (l, r) = ctx.tropical_degrees(k as u32 + 1)?;
                let (wl, wr) = want.get_or_insert_with(|| (vec![0i32; l.len()], vec![0i32; r.len()]));
                for (a, b) in wl.iter_mut().zip(&l) {
                    *a += *mk as i32 * b;
                }
                for (a, b) in wr.iter_mut().zip(&r) {
                    *a += *mk as i32 * b;
                }
            }
            let degrees_match = match (&rep.highest, &want) {
                (Some((l, r)), Some((wl, wr))) => l.as_slice() == wl.as_slice() && r.as_slice() == wr.as_slice(),
                _ => false,
            };
            Ok(Outcome {
                value: json!({ "command": "qtrace", "n": n, "powers": m, "degrees_match_tropical": degrees_match, "report": rep }),
                verified: degrees_match,
            })
        }
        Command::Independence { n, max_total } => {
            check_n(*n)?;
            let rep = independence_check(*n, *max_total)?;
            let ok = rep.injective && rep.inverse_matches;
            Ok(Outcome {
                value: json!({ "command": "independence", "report": rep }),
                verified: ok,
            })
        }
        Command::Matrices { n } => {
            check_n(*n)?;
            let torus = Torus::new(*n)?;
            let l = left_matrix(&torus)?;
            let r = right_matrix(&torus)?;
            let lemma = check_diagonal_lemma(&l)?;
            let ok = lemma.all_pass() && l.is_lower_triangular() && r.is_upper_triangular();
            Ok(Outcome {
                value: json!({ "command": "matrices", "n": n, "left": l, "right": r, "diagonal_lemma": lemma }),
                verified: ok,
            })
        }
        Command::Fan {
            n,
            function,
            hilbert_bound,
            points,
        } => {
            check_n(*n)?;
            let mut out = serde_json::Map::new();
            out.insert("command".into(), json!("fan"));
            out.insert("n".into(), json!(n));
            let mut ok = true;
            let mut tr = Vec::new();
            for k in 1..*n {
                let t = tropical_t(*n, k, Side::R)?;
                let r = rhombus(&t);
                tr.push(json!({ "k": k, "t_right": t.to_json(), "t_left": tropical_t(*n, k, Side::L)?.to_json(), "rhombus": r.to_json() }));
            }
            out.insert("tropical".into(), Value::Array(tr));
            if let Some(path) = function {
                let f = load_function(path)?;
                if f.n() != *n {
                    return Err(invalid("function rank differs from --n"));
                }
                out.insert("membership".into(), json!(fan_membership(&f)));
                out.insert("rhombus".into(), rhombus(&f).to_json());
            }
            if let Some(bound) = hilbert_bound {
                let rep = hilbert_basis(*n, *bound)?;
                ok &= rep.decomposition_sound;
                out.insert(
                    "hilbert".into(),
                    json!({
                        "bound": bound,
                        "members": rep.members,
                        "basis": rep.basis.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
                        "decomposition_sound": rep.decomposition_sound,
                        "certified": rep.certified,
                    }),
                );
            }
            if let Some(total) = points {
                let pts = annulus_fan_points(*n, *total)?;
                let glued = pts.iter().all(|p| p.satisfies_gluing());
                ok &= glued;
                out.insert(
                    "annulus_points".into(),
                    json!({
                        "max_total": total,
                        "count": pts.len(),
                        "all_glued": glued,
                        "points": pts.iter().map(|p| json!({ "left": p.left.to_json(), "right": p.right.to_json() })).collect::<Vec<_>>(),
                    }),
                );
            }
            Ok(Outcome {
                value: Value::Object(out),
                verified: ok,
            })
        }
        Command::Reduce {
            n,
            strands,
            word,
            strategy,
        } => {
            check_n(*n)?;
            let ring = RingContext::new(*n)?;
            let beta = BraidWord::parse(*strands, word)?;
            let strategy = match strategy {
                StrategyArg::Leftmost => Strategy::Leftmost,
                StrategyArg::Rightmost => Strategy::Rightmost,
            };
            let mut reducer = Reducer::new(skein_constants(ring, &cli.skein_constants)?, strategy)?;
            let p = reducer.reduce(&beta)?;
            let conserved = p.conserves_winding(*strands);
            let mut value = p.to_json();
            if let Value::Object(m) = &mut value {
                m.insert("command".into(), json!("reduce"));
                m.insert("n".into(), json!(n));
                m.insert("braid".into(), json!(beta));
                m.insert("winding_conserved".into(), json!(conserved));
            }
            Ok(Outcome {
                value,
                verified: conserved,
            })
        }
        Command::Pbeta { n, i } => {
            check_n(*n)?;
            if *i == 0 {
                return Err(invalid("i must be at least 1"));
            }
            let ring = RingContext::new(*n)?;
            let mut reducer = Reducer::new(skein_constants(ring, &cli.skein_constants)?, Strategy::Leftmost)?;
            let rep = verify_p_closed_form(ring, &mut reducer, *i)?;
            let asserted = *i <= 4;
            let signs = rep.value_at_plus_one == rep.expected_at_plus_one
                && rep.value_at_minus_one == rep.expected_at_minus_one;
            let roots_ok = *i >= *n || rep.roots.all_in_bad_set;
            let ok = !asserted || (rep.matches && signs && roots_ok);
            Ok(Outcome {
                value: json!({ "command": "pbeta", "asserted": asserted, "report": rep }),
                verified: ok,
            })
        }
        Command::Selftest { n } => {
            check_n(*n)?;
            let suites = selftest(*n, &counit_constants(&cli.constants)?, cli.threads)?;
            let all = suites.iter().all(|s| s.passed == s.total);
            let list: Vec<Value> = suites
                .iter()
                .map(|s| json!({ "name": s.name, "passed": s.passed, "total": s.total }))
                .collect();
            Ok(Outcome {
                value: json!({ "command": "selftest", "n": n, "suites": list, "all_passed": all }),
                verified: all,
            })
        }
    }
}

fn load_function(path: &Path) -> Result<TriangleFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| invalid(format!("bad JSON: {e}")))?;
    TriangleFunction::from_json(&v)
}

pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            passed: 0,
            total: 0,
        }
    }

    fn record(&mut self, ok: bool) {
        self.total += 1;
        self.passed += ok as usize;
    }
}

fn random_element(rng: &mut ChaCha8Rng, torus: &std::sync::Arc<Torus>) -> Result<TorusElement> {
    let verts = torus.triangle.vertices().to_vec();
    let mut acc = TorusElement::zero(torus);
    for _ in 0..rng.gen_range(1..=3) {
        let mut term = TorusElement::one(torus);
        for _ in 0..rng.gen_range(1..=3) {
            let v = verts[rng.gen_range(0..verts.len())];
            term = term.mul(&TorusElement::generator(torus, v, rng.gen_range(-3..=3))?)?;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

pub fn selftest(n: u32, counit: &CounitConstants, threads: Option<usize>) -> Result<Vec<SuiteResult>> {
    let ring = RingContext::new(n)?;
    let torus = Torus::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    let mut suites = Vec::new();

    let mut s = SuiteResult::new("quantum_torus");
    for _ in 0..20 {
        let a = random_element(&mut rng, &torus)?;
        let b = random_element(&mut rng, &torus)?;
        let c = random_element(&mut rng, &torus)?;
        s.record(a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?);
        let v = torus.triangle.vertex(rng.gen_range(0..torus.triangle.len()));
        let p = rng.gen_range(-4..=4);
        let g = TorusElement::generator(&torus, v, p)?.mul(&TorusElement::generator(&torus, v, -p)?)?;
        s.record(g == TorusElement::one(&torus));
    }
    suites.push(s);

    let mut s = SuiteResult::new("matrices");
    let l = left_matrix(&torus)?;
    s.record(check_diagonal_lemma(&l)?.all_pass());
    s.record(l.is_lower_triangular());
    s.record(right_matrix(&torus)?.is_upper_triangular());
    suites.push(s);

    let mut s = SuiteResult::new("counit");
    for k in 1..n {
        for (i, lsorted) in sorted_admissible_patterns(n, k) {
            s.record(check_collected_identity(ring, k, &i, &lsorted, counit)?);
        }
    }
    suites.push(s);

    let mut s = SuiteResult::new("annulus_trace");
    let ctx = AnnulusContext::new(n)?.with_counit(counit.clone()).with_threads(threads);
    for k in 1..n {
        s.record(ctx.highest_degree_check(k)?.passed());
    }
    s.record(ctx.trace_simple_loop()?.all_coefficients_one());
    if n <= 4 {
        s.record(ctx.peeling_check()?.proportional);
    }
    suites.push(s);

    let mut s = SuiteResult::new("independence");
    let rep = independence_check(n, 4)?;
    s.record(rep.injective);
    s.record(rep.inverse_matches);
    suites.push(s);

    let mut s = SuiteResult::new("tropical_fan");
    for k in 1..n {
        let r = rhombus(&tropical_t(n, k, Side::R)?);
        let ok = r.top.iter().flatten().all(|x| *x == 0.into())
            && r.bottom_right.iter().flatten().all(|x| *x == 0.into())
            && r.bottom_left.iter().enumerate().all(|(i, row)| {
                row.iter().all(|x| *x == if i as u32 + 1 == k { 1.into() } else { 0.into() })
            });
        s.record(ok);
    }
    if n <= 4 {
        let h = hilbert_basis(n, n * n)?;
        s.record(h.certified);
    }
    s.record(annulus_fan_points(n, 2)?.iter().all(|p| p.satisfies_gluing()));
    s.record(glued_pairs_are_generated(n, n)?);
    suites.push(s);

    let mut s = SuiteResult::new("braid_reduction");
    let consts = SkeinConstants::standard(ring);
    let mut left = Reducer::new(consts.clone(), Strategy::Leftmost)?;
    let mut right = Reducer::new(consts, Strategy::Rightmost)?;
    for m in 2..=n.min(4) {
        for _ in 0..5 {
            let len = rng.gen_range(0..7);
            let word = (0..len)
                .map(|_| rng.gen_range(1..m as i32) * if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            let b = BraidWord::new(m, word)?;
            let a = left.reduce(&b)?;
            s.record(a.conserves_winding(m) && a == right.reduce(&b)?);
        }
    }
    for i in 1..n.min(5) {
        let rep = verify_p_closed_form(ring, &mut left, i)?;
        s.record(
            rep.matches
                && rep.roots.all_in_bad_set
                && rep.value_at_plus_one == rep.expected_at_plus_one
                && rep.value_at_minus_one == rep.expected_at_minus_one,
        );
    }
    suites.push(s);

    Ok(suites)
}

fn render_pretty(value: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(m) = value {
        let width = m.keys().map(|k| k.len()).max().unwrap_or(0);
        for (k, v) in m {
            out.push_str(&format!("{k:width$}  {v}\n"));
        }
    } else {
        out.push_str(&value.to_string());
        out.push('\n');
    }
    out
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::InvalidInput(_) => 2,
                _ => 1,
            };
        }
    };
    let mut value = outcome.value;
    if let Value::Object(m) = &mut value {
        m.insert("schema".into(), json!(SCHEMA));
        m.insert("verified".into(), json!(outcome.verified));
    }
    let text = if cli.pretty {
        render_pretty(&value)
    } else {
        let mut s = value.to_string();
        s.push('\n');
        s
    };
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    if outcome.verified {
        0
    } else {
        eprintln!("verification failed");
        1
    }
}
