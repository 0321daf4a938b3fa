use std::fmt::Write as _;
use std::sync::Arc;

use log::{debug, info};
use num_traits::Zero;
use serde_json::{json, Map, Value};
use symkit::casestudies::{
    cross_validate, dimension_formula, evolution_case, exponential_scan, heat_system, lambda_mu_grid,
    schrodinger_context, schrodinger_pde, schrodinger_space, solve_ansatz, EvolutionCaps,
};
use symkit::jet::{
    evolution_determining_solve, lie_bracket, EvolutionAnsatz, GenVectorField, PdeSystem,
};
use symkit::linalg::{char_poly, ExactMatrix};
use symkit::linop::{operator_determining_solve, LinDiffOp, OperatorAnsatz, OperatorPde};
use symkit::structure::{ansatz_dimensions, structured_basis, Element, SpaceKind, SymmetrySpace};
use symkit::{GaussRat, VarContext, VarId};

use crate::ast::{LambdaItem, ProblemFile, Stored, SymmetryFile, TaskKind};
use crate::lower::{as_operator, evolution_system, jet_poly, operator_pde, weights, SemanticError};
use crate::parse::SyntaxError;

pub const SCHEMA: u32 = 1;
pub const DEFAULT_ORDER: usize = 2;
/// Upper limit for caps chosen by the dimension-bound iteration.
const MAX_AUTO_CAP: u32 = 12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }

    pub fn syntax(path: &str, e: SyntaxError) -> Self {
        CliError::Input(format!("{path}:{e}"))
    }
}

impl From<SemanticError> for CliError {
    fn from(e: SemanticError) -> Self {
        CliError::Input(e.0)
    }
}

fn invariant(e: impl std::fmt::Display) -> CliError {
    CliError::Invariant(e.to_string())
}

/// Result of a command: the JSON document, a plain-text rendering and
/// whether every check passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    pub ok: bool,
}

/// Canonical serialization: sorted keys, two-space indent, trailing newline.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Command-line overrides; `None` falls back to the file, then defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub order: Option<usize>,
    pub lambda: Option<Vec<LambdaItem>>,
    pub caps: Option<Vec<u32>>,
    pub verify: bool,
}

struct Settings {
    order: usize,
    lambda: Vec<LambdaItem>,
    caps: Option<Vec<u32>>,
    verify: bool,
    kind: TaskKind,
}

fn settings(file: &ProblemFile, o: &Overrides) -> Settings {
    let task = file.task.as_ref();
    Settings {
        order: o.order.or(task.and_then(|t| t.order)).unwrap_or(DEFAULT_ORDER),
        lambda: o
            .lambda
            .clone()
            .or_else(|| task.and_then(|t| t.lambda.clone()))
            .unwrap_or_else(|| vec![LambdaItem::Scalar(crate::ast::Expr::Num(GaussRat::zero()))]),
        caps: o.caps.clone().or_else(|| task.and_then(|t| t.caps.clone())),
        verify: o.verify || task.is_some_and(|t| t.verify),
        kind: task.map_or(TaskKind::Solve, |t| t.kind),
    }
}

fn strs(v: &[GaussRat]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn matrix_json(m: &ExactMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| strs(m.row(i))).collect())
}

fn weight_label(w: &[GaussRat]) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

// ---- the two solvers behind `solve` ----

enum Problem {
    Operator(OperatorPde),
    Evolution(PdeSystem),
}

impl Problem {
    fn kind(&self) -> SpaceKind {
        match self {
            Problem::Operator(_) => SpaceKind::Operator,
            Problem::Evolution(_) => SpaceKind::Evolutionary,
        }
    }

    fn ctx(&self) -> Arc<VarContext> {
        match self {
            Problem::Operator(p) => p.ctx().clone(),
            Problem::Evolution(s) => s.ctx().vars().clone(),
        }
    }

    fn check(&self, e: &Element) -> Result<bool, CliError> {
        match (self, e) {
            (Problem::Operator(p), Element::Operator(r)) => p.is_symmetry(r).map_err(invariant),
            (Problem::Evolution(s), Element::Characteristic(eta)) => {
                let f = GenVectorField::evolutionary(s.ctx(), eta.to_vec()).map_err(invariant)?;
                s.is_symmetry(&f).map_err(invariant)
            }
            _ => Err(CliError::Invariant("element kind does not match the problem".into())),
        }
    }
}

/// Basis, the caps that were used, and an optional hint about the caps.
type Level = (Vec<Element>, Vec<u32>, Option<String>);

/// One solve at order `q` and weight `w`.
fn solve_level(problem: &Problem, q: usize, w: &[GaussRat], caps: &Option<Vec<u32>>) -> Result<Level, CliError> {
    match problem {
        Problem::Operator(pde) => {
            let ctx = pde.ctx();
            let run = |caps: Vec<u32>| -> Result<Vec<Element>, CliError> {
                let ansatz = OperatorAnsatz {
                    order: q,
                    degree_caps: caps,
                    weights: w.to_vec(),
                };
                let sol = operator_determining_solve(pde, &ansatz).map_err(invariant)?;
                debug!("order {q}: {} unknowns, rank {}", sol.unknowns, sol.rank);
                Ok(sol.basis.into_iter().map(Element::Operator).collect())
            };
            match caps {
                Some(c) if c.len() == 1 => {
                    let c = vec![c[0]; ctx.len()];
                    Ok((run(c.clone())?, c, None))
                }
                Some(c) if c.len() == ctx.len() => Ok((run(c.clone())?, c.clone(), None)),
                Some(c) => Err(CliError::Input(format!(
                    "operator caps take 1 or {} entries, got {}",
                    ctx.len(),
                    c.len()
                ))),
                None => {
                    // iterate caps = v - 1 until the dimension settles
                    let mut cap = (q as u32 + 1).min(MAX_AUTO_CAP);
                    let mut basis = run(vec![cap; ctx.len()])?;
                    loop {
                        let next = (basis.len().saturating_sub(1) as u32).clamp(cap, MAX_AUTO_CAP);
                        if next == cap {
                            break;
                        }
                        info!("order {q}: dimension {} at cap {cap}, retrying with cap {next}", basis.len());
                        cap = next;
                        let again = run(vec![cap; ctx.len()])?;
                        let settled = again.len() == basis.len();
                        basis = again;
                        if settled {
                            break;
                        }
                    }
                    Ok((basis, vec![cap; ctx.len()], None))
                }
            }
        }
        Problem::Evolution(sys) => {
            let c = match caps {
                None => vec![1, q as u32 + 1, q as u32 + 1],
                Some(c) if c.len() == 3 => c.clone(),
                Some(c) => {
                    return Err(CliError::Input(format!(
                        "evolution caps are [jet_degree, translation_degree, free_degree], got {} entries",
                        c.len()
                    )))
                }
            };
            let ansatz = EvolutionAnsatz {
                order: q,
                jet_degree: c[0],
                translation_degree: c[1],
                free_degree: c[2],
                lambda: w.to_vec(),
            };
            let sol = evolution_determining_solve(sys, &ansatz).map_err(invariant)?;
            debug!("order {q}: {} unknowns, rank {}", sol.unknowns, sol.rank);
            let basis = sol.basis.into_iter().map(|e| Element::Characteristic(vec![e])).collect();
            Ok((basis, c, sol.cap_hint))
        }
    }
}

/// Jet order needed to check symmetries of order `q` of an equation of
/// order `r`.
fn jet_order(q: usize, r: usize) -> usize {
    q + r + 2
}

fn lower_problem(file: &ProblemFile, s: &Settings, evolution: bool) -> Result<Problem, CliError> {
    let r = file.lhs.max_order().max(file.rhs.max_order());
    let jet = file.decls.jet_context(jet_order(s.order, r))?;
    if file.decls.unknowns.len() != 1 {
        return Err(CliError::Input("problem files take exactly one unknown".into()));
    }
    if !evolution {
        let f = &jet_poly(&jet, &file.lhs)? - &jet_poly(&jet, &file.rhs)?;
        let ctx = file.decls.operator_context();
        if let Ok(op) = ctx.and_then(|ctx| as_operator(&jet, &f, &ctx)) {
            info!("linear equation, solving for symmetry operators");
            return Ok(Problem::Operator(operator_pde(op)?));
        }
    }
    info!("solving for evolutionary symmetries");
    Ok(Problem::Evolution(evolution_system(&jet, &file.lhs, &file.rhs)?))
}

fn structure_json(space: &SymmetrySpace) -> (Value, bool) {
    let report = match ansatz_dimensions(space, None) {
        Ok(r) => r,
        Err(e) => return (json!({ "error": e.to_string() }), true),
    };
    let blocks: Vec<Value> = report
        .block_dims
        .iter()
        .zip(&report.eigenvalues)
        .zip(&report.nilpotency)
        .map(|((r, l), k)| json!({ "dim": r, "eigenvalues": strs(l), "nilpotency": k }))
        .collect();
    let mut out = json!({
        "blocks": blocks,
        "rho": report.rho,
        "inequalities_hold": report.inequalities_hold,
    });
    let mut ok = report.inequalities_hold;
    match structured_basis(space) {
        Ok(sb) => {
            let v = sb.verify(space);
            ok &= v.all_ok();
            out["verification"] = json!({
                "commuting": v.commuting,
                "degree_bound": v.degree_bound,
                "span_preserved": v.span_preserved,
                "differentiation_consistent": v.differentiation_consistent,
                "block_exp_derivative": v.block_exp_derivative,
                "reconstruction": v.reconstruction,
                "round_trip": v.round_trip,
            });
            out["structured_basis"] = Value::Array(sb.elements().map(|e| e.element.to_json()).collect());
        }
        Err(e) => out["verification"] = json!({ "error": e.to_string() }),
    }
    (out, ok)
}

fn translation_ids(ctx: &VarContext) -> Vec<VarId> {
    ctx.translations().to_vec()
}

/// `solve`: symmetries of the problem for each weight, plus the dimension
/// table and block structure at weight zero.
pub fn solve(file: &ProblemFile, o: &Overrides) -> Result<Outcome, CliError> {
    let s = settings(file, o);
    let problem = lower_problem(file, &s, s.kind == TaskKind::Evolution)?;
    let ctx = problem.ctx();
    let g = ctx.weight_len();
    let ws = weights(&s.lambda, g)?;
    let mut text = String::new();
    let mut ok = true;
    let mode = match problem.kind() {
        SpaceKind::Operator => "operator",
        SpaceKind::Evolutionary => "evolution",
    };
    writeln!(text, "mode: {mode}, order {}", s.order).unwrap();
    let mut runs = Vec::new();
    for w in &ws {
        let (basis, caps, hint) = solve_level(&problem, s.order, w, &s.caps)?;
        let mut run = json!({
            "lambda": strs(w),
            "caps": caps,
            "dimension": basis.len(),
            "basis": basis.iter().map(Element::to_json).collect::<Vec<_>>(),
        });
        writeln!(text, "lambda {}: dimension {}", weight_label(w), basis.len()).unwrap();
        for b in &basis {
            writeln!(text, "  {b}").unwrap();
        }
        if let Some(h) = hint {
            run["cap_hint"] = Value::String(h);
        }
        if s.verify {
            let mut all = true;
            for b in &basis {
                all &= problem.check(b)?;
            }
            run["verified"] = Value::Bool(all);
            ok &= all;
        }
        runs.push(run);
    }
    let mut out = json!({
        "schema": SCHEMA,
        "command": "solve",
        "problem": file.to_string(),
        "mode": mode,
        "order": s.order,
        "runs": runs,
    });
    if ws.iter().any(|w| w.iter().all(Zero::is_zero)) {
        let zero = vec![GaussRat::zero(); g];
        let mut levels = Vec::new();
        let mut table = Vec::new();
        for q in 0..=s.order {
            let (basis, _, _) = solve_level(&problem, q, &zero, &s.caps)?;
            table.push(json!({ "q": q, "dimension": basis.len() }));
            levels.push((q, basis));
        }
        writeln!(
            text,
            "dimensions: {}",
            table.iter().map(|t| t["dimension"].to_string()).collect::<Vec<_>>().join(", ")
        )
        .unwrap();
        out["dimensions"] = Value::Array(table);
        if g > 0 {
            match SymmetrySpace::from_levels(problem.kind(), &ctx, levels, translation_ids(&ctx)) {
                Ok(space) => {
                    let (st, good) = structure_json(&space);
                    writeln!(text, "structure: {}", if good { "verified" } else { "FAILED" }).unwrap();
                    if s.verify {
                        ok &= good;
                    }
                    out["structure"] = st;
                }
                Err(e) => out["structure"] = json!({ "error": e.to_string() }),
            }
        }
    }
    out["ok"] = Value::Bool(ok);
    Ok(Outcome { json: out, text, ok })
}

/// `adjoint`: matrices of the translation actions on the order-`q` space.
pub fn adjoint(file: &ProblemFile, o: &Overrides) -> Result<Outcome, CliError> {
    let s = settings(file, o);
    let problem = lower_problem(file, &s, s.kind == TaskKind::Evolution)?;
    let ctx = problem.ctx();
    let zero = vec![GaussRat::zero(); ctx.weight_len()];
    let (basis, _, _) = solve_level(&problem, s.order, &zero, &s.caps)?;
    let space = SymmetrySpace::new(problem.kind(), &ctx, basis, translation_ids(&ctx)).map_err(invariant)?;
    let gs = space.adjoint_matrices().map_err(invariant)?;
    let mut text = String::new();
    let mut mats = Map::new();
    for (z, m) in space.translations().iter().zip(&gs) {
        let name = ctx.name(*z).to_string();
        let p = char_poly(m).map_err(invariant)?;
        writeln!(text, "G^({name}), characteristic polynomial {p}:").unwrap();
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(text, "  [{}]", row.join(", ")).unwrap();
        }
        mats.insert(name, json!({ "matrix": matrix_json(m), "char_poly": p.to_string() }));
    }
    let out = json!({
        "schema": SCHEMA,
        "command": "adjoint",
        "problem": file.to_string(),
        "order": s.order,
        "basis": space.basis().iter().map(Element::to_json).collect::<Vec<_>>(),
        "adjoint": mats,
        "commuting": true,
        "ok": true,
    });
    Ok(Outcome { json: out, text, ok: true })
}

/// `bracket`: commutator of two operators or Lie bracket of two
/// characteristics.
pub fn bracket(a: &SymmetryFile, b: &SymmetryFile) -> Result<Outcome, CliError> {
    if a.decls != b.decls {
        return Err(CliError::Input("the two files declare different variables".into()));
    }
    let (result, kind) = match (&a.symmetry, &b.symmetry) {
        (Stored::Operator(x), Stored::Operator(y)) => {
            let ctx = a.decls.operator_context()?;
            let jet = a.decls.jet_context(x.max_order().max(y.max_order()))?;
            let op = |e| -> Result<LinDiffOp, CliError> { Ok(as_operator(&jet, &jet_poly(&jet, e)?, &ctx)?) };
            let c = op(x)?.commutator(&op(y)?).map_err(invariant)?;
            (Element::Operator(c), "operator")
        }
        (Stored::Characteristic(x), Stored::Characteristic(y)) => {
            let n = a.decls.unknowns.len();
            if x.len() != n || y.len() != n {
                return Err(CliError::Input(format!("characteristics need {n} components")));
            }
            let order = |v: &[crate::ast::Expr]| v.iter().map(|e| e.max_order()).max().unwrap_or(0);
            let jet = a.decls.jet_context(order(x) + order(y) + 1)?;
            let field = |v: &[crate::ast::Expr]| -> Result<GenVectorField, CliError> {
                let eta = v.iter().map(|e| jet_poly(&jet, e)).collect::<Result<Vec<_>, _>>()?;
                GenVectorField::evolutionary(&jet, eta).map_err(invariant)
            };
            let c = lie_bracket(&field(x)?, &field(y)?).map_err(invariant)?;
            (Element::Characteristic(c.eta().to_vec()), "characteristic")
        }
        _ => return Err(CliError::Input("cannot bracket an operator with a characteristic".into())),
    };
    let out = json!({
        "schema": SCHEMA,
        "command": "bracket",
        "kind": kind,
        "rendered": result.to_string(),
        "result": result.to_json(),
        "ok": true,
    });
    Ok(Outcome {
        json: out,
        text: format!("{result}\n"),
        ok: true,
    })
}

/// `schrodinger`: the built-in free Schrodinger study up to `qmax`.
pub fn schrodinger(qmax: usize, verify: bool) -> Result<Outcome, CliError> {
    let mut text = String::new();
    let mut ok = true;
    let mut table = Vec::new();
    writeln!(text, "q  v(q)  (q+1)(q+2)/2  spans_agree  bidegree").unwrap();
    for q in 0..=qmax {
        let cv = cross_validate(q).map_err(invariant)?;
        let formula = dimension_formula(q);
        ok &= cv.ansatz_dim == formula && cv.spans_agree && cv.bidegree_ok;
        writeln!(
            text,
            "{q:<2} {:<5} {formula:<13} {:<12} {}",
            cv.ansatz_dim, cv.spans_agree, cv.bidegree_ok
        )
        .unwrap();
        table.push(json!({
            "q": q,
            "dimension": cv.ansatz_dim,
            "recurrence_dimension": cv.recurrence_dim,
            "formula": formula,
            "spans_agree": cv.spans_agree,
            "bidegree_ok": cv.bidegree_ok,
        }));
    }
    let mut scan = Vec::new();
    for q in 1..=qmax.min(3) {
        for p in exponential_scan(q, &lambda_mu_grid()).map_err(invariant)? {
            ok &= p.dimension == 0;
            scan.push(json!({
                "q": q,
                "lambda": p.lambda.to_string(),
                "mu": p.mu.to_string(),
                "dimension": p.dimension,
            }));
        }
    }
    writeln!(text, "nonzero exponential weights: {} samples, all empty: {}", scan.len(), scan.iter().all(|p| p["dimension"] == 0)).unwrap();
    let space = schrodinger_space(qmax).map_err(invariant)?;
    let (st, good) = structure_json(&space);
    ok &= good;
    writeln!(text, "structure of V^({qmax}): {}", if good { "verified" } else { "FAILED" }).unwrap();
    let mut out = json!({
        "schema": SCHEMA,
        "command": "schrodinger",
        "qmax": qmax,
        "dimensions": table,
        "exponential_scan": scan,
        "structure": st,
    });
    if verify {
        let ctx = schrodinger_context();
        let pde = schrodinger_pde(&ctx);
        let basis = solve_ansatz(qmax).map_err(invariant)?.basis;
        let mut all = true;
        for r in &basis {
            all &= pde.is_symmetry(r).map_err(invariant)?;
        }
        writeln!(text, "residual check of V^({qmax}): {all}").unwrap();
        out["verified"] = Value::Bool(all);
        ok &= all;
    }
    out["ok"] = Value::Bool(ok);
    Ok(Outcome { json: out, text, ok })
}

/// `evolution`: evolutionary symmetries of a solved evolution equation,
/// the heat equation when no file is given.
pub fn evolution(file: Option<&ProblemFile>, o: &Overrides) -> Result<Outcome, CliError> {
    let (sys, s, problem) = match file {
        Some(f) => {
            let s = settings(f, o);
            let Problem::Evolution(sys) = lower_problem(f, &s, true)? else { unreachable!() };
            (sys, s, f.to_string())
        }
        None => {
            let src = "vars t, y;\nunknowns u;\ntranslations y;\neq D[u, t] = D[u, y, y];\n";
            let f = crate::parse::parse_problem(src).expect("built-in problem parses");
            let s = settings(&f, o);
            let sys = heat_system(jet_order(s.order, 2)).map_err(invariant)?;
            (sys, s, f.to_string())
        }
    };
    if sys.ctx().vars().weight_len() != 1 {
        return Err(CliError::Input("evolution needs exactly one translation variable".into()));
    }
    let lambdas: Vec<GaussRat> = weights(&s.lambda, 1)?.into_iter().map(|mut w| w.remove(0)).collect();
    let caps = match &s.caps {
        None => EvolutionCaps {
            jet_degree: 1,
            translation_degree: s.order as u32 + 1,
            free_degree: s.order as u32 + 1,
        },
        Some(c) if c.len() == 3 => EvolutionCaps {
            jet_degree: c[0],
            translation_degree: c[1],
            free_degree: c[2],
        },
        Some(_) => return Err(CliError::Input("evolution caps are [jet_degree, translation_degree, free_degree]".into())),
    };
    let rep = evolution_case(&sys, s.order, caps, &lambdas).map_err(invariant)?;
    let mut text = String::new();
    let mut ok = !rep.leading_constant_at_nonzero_lambda;
    let mut runs = Vec::new();
    for r in &rep.runs {
        writeln!(text, "lambda {}: dimension {}", r.lambda, r.basis.len()).unwrap();
        for b in &r.basis {
            writeln!(text, "  {b}").unwrap();
        }
        if s.verify {
            ok &= r.verified;
        }
        let mut run = json!({
            "lambda": r.lambda.to_string(),
            "dimension": r.basis.len(),
            "basis": r.basis.iter().map(|b| b.to_json()).collect::<Vec<_>>(),
            "verified": r.verified,
            "max_translation_degree": r.max_translation_degree,
            "leading_constant": r.leading_constant,
        });
        if let Some(h) = &r.cap_hint {
            run["cap_hint"] = Value::String(h.clone());
        }
        runs.push(run);
    }
    let out = json!({
        "schema": SCHEMA,
        "command": "evolution",
        "problem": problem,
        "order": s.order,
        "caps": [caps.jet_degree, caps.translation_degree, caps.free_degree],
        "runs": runs,
        "zero_lambda_dim": rep.zero_lambda_dim,
        "nonzero_lambda_solutions": rep.nonzero_lambda_solutions,
        "leading_constant_at_nonzero_lambda": rep.leading_constant_at_nonzero_lambda,
        "translation_degree_within_bound": rep.translation_degree_within_bound,
        "ok": ok,
    });
    Ok(Outcome { json: out, text, ok })
}
