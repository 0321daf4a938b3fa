//! One PASS/FAIL line per acceptance criterion. All comparisons are exact;
//! the only tolerances are the wall-clock budgets below.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use symkit::casestudies::{
    ansatz_basis, cross_validate, dimension_formula, evolution_case, exponential_scan, h_table, heat_system,
    lambda_mu_grid, lambda_samples, schrodinger_context, schrodinger_pde, schrodinger_space, solve_ansatz,
    EvolutionCaps, X, T,
};
use symkit::jet::{lie_bracket, total_derivative, GenVectorField, JetContext, PdeSystem};
use symkit::linalg::{block_exp, char_poly, UniPoly};
use symkit::linop::LinDiffOp;
use symkit::structure::{ansatz_dimensions, express_in, structured_basis, Element};
use symkit::{ExpPoly, GaussRat, Monomial, VarId, Weight};

const SCHRODINGER_BUDGET: Duration = Duration::from_secs(30);
const SCAN_BUDGET: Duration = Duration::from_secs(60);
const HEAT_BUDGET: Duration = Duration::from_secs(60);
const FIELD_CASES: u32 = 1000;
const JACOBI_CASES: u32 = 100;
const DERIVATIVE_CASES: u32 = 100;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, budget: Duration) -> Result<String, String> {
    let t = start.elapsed();
    ensure(t <= budget, format!("took {:.1?}, budget {budget:?}", t))?;
    Ok(format!("{:.1?}", t))
}

fn dimension_formula_via_cli() -> Check {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_symkit"))
        .args(["schrodinger", "--qmax", "4", "--json", "-"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), format!("exit status {}", out.status))?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let dims: Vec<u64> = v["dimensions"]
        .as_array()
        .ok_or("no dimension table")?
        .iter()
        .map(|d| d["dimension"].as_u64().unwrap_or(u64::MAX))
        .collect();
    ensure(dims == [1, 3, 6, 10, 15], format!("dimensions {dims:?}"))?;
    for (q, &d) in dims.iter().enumerate() {
        ensure(d as usize == (q + 1) * (q + 2) / 2, format!("q = {q}"))?;
    }
    let t = within(start, SCHRODINGER_BUDGET)?;
    Ok(format!("v = {dims:?} in {t}"))
}

fn two_routes_agree() -> Check {
    let start = Instant::now();
    for q in 0..=4 {
        let cv = cross_validate(q).map_err(|e| e.to_string())?;
        ensure(
            cv.spans_agree && cv.stacked_rank == cv.ansatz_dim && cv.recurrence_dim == cv.ansatz_dim,
            format!("q = {q}: {cv:?}"),
        )?;
        ensure(cv.ansatz_dim == dimension_formula(q), format!("q = {q}: dimension {}", cv.ansatz_dim))?;
    }
    let t = within(start, SCHRODINGER_BUDGET)?;
    Ok(format!("stacked rank = dimension for q = 0..4 in {t}"))
}

fn exponential_exclusion() -> Check {
    let start = Instant::now();
    let grid = lambda_mu_grid();
    ensure(grid.len() == 8, format!("grid has {} points", grid.len()))?;
    ensure(grid.iter().all(|(l, m)| !(l.is_zero() && m.is_zero())), "grid contains (0, 0)")?;
    for q in 1..=3 {
        for p in exponential_scan(q, &grid).map_err(|e| e.to_string())? {
            ensure(p.dimension == 0, format!("q = {q}, ({}, {}): dimension {}", p.lambda, p.mu, p.dimension))?;
        }
    }
    let t = within(start, SCAN_BUDGET)?;
    Ok(format!("24 weighted solves all empty in {t}"))
}

fn bidegrees() -> Check {
    let ctx = schrodinger_context();
    let mut checked = 0;
    for q in 0..=4 {
        let basis = solve_ansatz(q).map_err(|e| e.to_string())?.basis;
        for hs in h_table(&ctx, q, &basis).map_err(|e| e.to_string())? {
            for (j, h) in hs.iter().enumerate() {
                let dt = h.degree_in(T).unwrap_or(0) as usize;
                let dx = h.degree_in(X).unwrap_or(0) as usize;
                ensure(dt <= j && dx <= q - j, format!("q = {q}, h_{j} = {h}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} coefficients h_j within (deg_t <= j, deg_x <= q - j)"))
}

fn pure_power(p: &UniPoly, n: usize) -> bool {
    *p == UniPoly::monomial(GaussRat::one(), n)
}

fn pipeline() -> Check {
    let space = schrodinger_space(2).map_err(|e| e.to_string())?;
    let gs = space.adjoint_matrices().map_err(|e| e.to_string())?;
    ensure(gs.len() == 2, "expected G^t and G^x")?;
    ensure(&gs[0] * &gs[1] == &gs[1] * &gs[0], "adjoint matrices do not commute")?;
    for g in &gs {
        let p = char_poly(g).map_err(|e| e.to_string())?;
        ensure(pure_power(&p, 6), format!("char poly {p}"))?;
    }
    let rep = ansatz_dimensions(&space, None).map_err(|e| e.to_string())?;
    ensure(rep.block_dims.iter().sum::<usize>() == 6, format!("block dims {:?}", rep.block_dims))?;
    for (r, ks) in rep.block_dims.iter().zip(&rep.nilpotency) {
        ensure(ks.iter().all(|&k| 1 <= k && k <= *r), format!("k = {ks:?}, r = {r}"))?;
    }
    let sb = structured_basis(&space).map_err(|e| e.to_string())?;
    for b in &sb.blocks {
        for e in &b.elements {
            for (&z, &k) in space.translations().iter().zip(&b.nilpotency) {
                ensure((e.element.degree_in(z) as usize) < k, format!("{} has degree >= {k}", e.element))?;
            }
        }
    }
    ensure(sb.verify(&space).all_ok(), "structured verification failed")?;
    Ok(format!(
        "char polys x^6, blocks {:?}, nilpotency {:?}",
        rep.block_dims, rep.nilpotency
    ))
}

fn differentiation() -> Check {
    let space = schrodinger_space(2).map_err(|e| e.to_string())?;
    let sb = structured_basis(&space).map_err(|e| e.to_string())?;
    let ctx = space.ctx();
    let mut n = 0;
    for b in &sb.blocks {
        let elems: Vec<Element> = b.elements.iter().map(|e| e.element.clone()).collect();
        for (s, &z) in space.translations().iter().enumerate() {
            let g = &b.matrices[s];
            let e = block_exp(g, &b.eigenvalues[s], b.nilpotency[s], z, ctx).map_err(|e| e.to_string())?;
            let d = e.partial(z);
            let ge = e.left_mul(g);
            for i in 0..e.dim() {
                for j in 0..e.dim() {
                    ensure(d.entries[i][j] == ge.entries[i][j], format!("entry ({i}, {j}) of d/dz exp(Gz)"))?;
                    n += 1;
                }
            }
            let images: Vec<Element> = elems.iter().map(|e| e.partial(z)).collect();
            let cols = express_in(&elems, &images).map_err(|i| format!("derivative of element {i} leaves the block"))?;
            for (j, col) in cols.iter().enumerate() {
                for (i, c) in col.iter().enumerate() {
                    ensure(*c == g[(i, j)], format!("block matrix entry ({i}, {j})"))?;
                }
            }
        }
    }
    Ok(format!("{n} exponential entries and all block matrices reproduced"))
}

fn caps(q: u32) -> EvolutionCaps {
    EvolutionCaps {
        jet_degree: 1,
        translation_degree: q + 1,
        free_degree: q + 1,
    }
}

fn closure() -> Check {
    let ctx = schrodinger_context();
    let pde = schrodinger_pde(&ctx);
    let zero = GaussRat::zero();
    let low = ansatz_basis(&ctx, 2, &zero, &zero).map_err(|e| e.to_string())?;
    let high: Vec<Element> = ansatz_basis(&ctx, 3, &zero, &zero)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(Element::Operator)
        .collect();
    let mut ops = 0;
    for (i, a) in low.iter().enumerate() {
        for b in &low[i + 1..] {
            let c = pde.reduce(&a.commutator(b).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            express_in(&high, &[Element::Operator(c.clone())]).map_err(|_| format!("[{a}, {b}] = {c} outside V^(3)"))?;
            ops += 1;
        }
    }
    let sys = heat_system(7).map_err(|e| e.to_string())?;
    let rep = evolution_case(&sys, 2, caps(2), &[zero]).map_err(|e| e.to_string())?;
    let fields: Vec<GenVectorField> = rep.runs[0]
        .basis
        .iter()
        .map(|e| GenVectorField::evolutionary(sys.ctx(), vec![e.clone()]))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut brackets = 0;
    for (i, a) in fields.iter().enumerate() {
        for b in &fields[i + 1..] {
            let c = lie_bracket(a, b).map_err(|e| e.to_string())?;
            let res = sys.apply_on_solutions(&c).map_err(|e| e.to_string())?;
            ensure(res.iter().all(ExpPoly::is_zero), format!("[{}, {}] is not a symmetry", a.eta()[0], b.eta()[0]))?;
            brackets += 1;
        }
    }
    Ok(format!("{ops} Schrodinger commutators in V^(3), {brackets} heat brackets with zero residual"))
}

// ---- property suites ----

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-9i64..=9, 1i64..=6, -9i64..=9, 1i64..=6).prop_map(|(a, b, c, d)| GaussRat::from_parts((a, b), (c, d)))
}

fn small() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -2i64..=2).prop_map(|(a, b)| GaussRat::from_parts((a, 1), (b, 1)))
}

type Raw = Vec<(bool, Vec<u32>, GaussRat)>;

fn raw(nvars: usize, max_exp: u32, terms: usize) -> impl Strategy<Value = Raw> {
    prop::collection::vec((prop::bool::ANY, prop::collection::vec(0..=max_exp, nvars), small()), 0..=terms)
}

fn build(ctx: &Arc<symkit::VarContext>, vars: &[VarId], raw: &Raw) -> ExpPoly {
    let g = ctx.weight_len();
    let mut p = ExpPoly::zero(ctx);
    for (weighted, exps, c) in raw {
        let w = if *weighted && g > 0 { Weight(vec![GaussRat::i(); g]) } else { Weight::zero(g) };
        p.add_term(w, Monomial::from_pairs(vars.iter().copied().zip(exps.iter().copied())), c.clone());
    }
    p
}

fn jet_ctx() -> Arc<JetContext> {
    JetContext::new(&["t", "x"], &["u"], 5, &["x"]).unwrap()
}

fn low_vars(c: &JetContext) -> Vec<VarId> {
    ["t", "x", "u", "u_t", "u_x"].iter().map(|n| c.var(n).unwrap()).collect()
}

fn run<S: Strategy>(cases: u32, s: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&s, f).map_err(|e| e.to_string())
}

fn properties() -> Check {
    run(FIELD_CASES, (gauss(), gauss(), gauss()), |(a, b, c)| {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), GaussRat::one());
        }
        Ok(())
    })
    .map_err(|e| format!("field axioms: {e}"))?;

    run(DERIVATIVE_CASES, raw(5, 2, 4), |r| {
        let c = jet_ctx();
        let p = build(c.vars(), &low_vars(&c), &r);
        let a = total_derivative(&c, &total_derivative(&c, &p, 0).unwrap(), 1).unwrap();
        let b = total_derivative(&c, &total_derivative(&c, &p, 1).unwrap(), 0).unwrap();
        prop_assert_eq!(a, b);
        Ok(())
    })
    .map_err(|e| format!("D_l commutation: {e}"))?;

    let field = || [raw(5, 1, 2), raw(5, 1, 2), raw(5, 2, 2)];
    run(JACOBI_CASES, (field(), field(), field()), |(a, b, d)| {
        let c = jet_ctx();
        let v = low_vars(&c);
        let mk = |r: &[Raw; 3]| {
            GenVectorField::new(
                &c,
                vec![build(c.vars(), &v, &r[0]), build(c.vars(), &v, &r[1])],
                vec![build(c.vars(), &v, &r[2])],
            )
            .unwrap()
        };
        let (p, q, r) = (mk(&a), mk(&b), mk(&d));
        let br = |x: &GenVectorField, y: &GenVectorField| lie_bracket(x, y).unwrap();
        let j = br(&br(&p, &q), &r).add(&br(&br(&q, &r), &p)).add(&br(&br(&r, &p), &q));
        prop_assert!(j.is_zero());
        Ok(())
    })
    .map_err(|e| format!("lie_bracket Jacobi: {e}"))?;

    let op = || prop::collection::vec((prop::collection::vec(0u32..=2, 2), raw(2, 2, 2)), 0..=3);
    run(JACOBI_CASES, (op(), op(), op()), |(a, b, d)| {
        let ctx = symkit::VarContext::independents(&["t", "x"], &["t", "x"]).unwrap();
        let vars: Vec<VarId> = ctx.ids().collect();
        let mk = |r: &Vec<(Vec<u32>, Raw)>| {
            let mut o = LinDiffOp::zero(&ctx);
            for (j, c) in r {
                o.add_term(j.clone(), build(&ctx, &vars, c));
            }
            o
        };
        let (x, y, z) = (mk(&a), mk(&b), mk(&d));
        let cm = |p: &LinDiffOp, q: &LinDiffOp| p.commutator(q).unwrap();
        prop_assert!(cm(&cm(&x, &y), &z).add(&cm(&cm(&y, &z), &x)).add(&cm(&cm(&z, &x), &y)).is_zero());
        Ok(())
    })
    .map_err(|e| format!("commutator Jacobi: {e}"))?;

    Ok(format!(
        "field axioms x{FIELD_CASES}, D_l commutation x{DERIVATIVE_CASES}, Jacobi (bracket, commutator) x{JACOBI_CASES} each"
    ))
}

fn heat_var(sys: &PdeSystem, name: &str) -> ExpPoly {
    sys.ctx().poly_var(sys.ctx().var(name).unwrap())
}

fn in_span(basis: &[ExpPoly], target: &ExpPoly) -> bool {
    let els: Vec<Element> = basis.iter().map(|e| Element::Characteristic(vec![e.clone()])).collect();
    express_in(&els, &[Element::Characteristic(vec![target.clone()])]).is_ok()
}

fn heat() -> Check {
    let start = Instant::now();
    let sys = heat_system(6).map_err(|e| e.to_string())?;
    let oracle = |eta: &ExpPoly| -> Result<bool, String> {
        let f = GenVectorField::evolutionary(sys.ctx(), vec![eta.clone()]).map_err(|e| e.to_string())?;
        Ok(sys.apply_on_solutions(&f).map_err(|e| e.to_string())?.iter().all(ExpPoly::is_zero))
    };
    let uy = heat_var(&sys, "u_y");
    let galilei = &(&heat_var(&sys, "t") * &uy).scale(&GaussRat::from_int(2)) + &(&heat_var(&sys, "y") * &heat_var(&sys, "u"));
    ensure(oracle(&uy)? && oracle(&galilei)?, "residual oracle rejects u_y or 2t u_y + y u")?;
    let q1 = evolution_case(&sys, 1, caps(1), &[GaussRat::zero()]).map_err(|e| e.to_string())?;
    ensure(in_span(&q1.runs[0].basis, &uy), "u_y missing at q = 1")?;
    ensure(in_span(&q1.runs[0].basis, &galilei), "2t u_y + y u missing at q = 1")?;

    let mut lambdas = vec![GaussRat::zero()];
    lambdas.extend(lambda_samples());
    let q2 = evolution_case(&sys, 2, caps(2), &lambdas).map_err(|e| e.to_string())?;
    ensure(in_span(&q2.runs[0].basis, &heat_var(&sys, "u_yy")), "u_yy missing at q = 2")?;
    ensure(!q2.leading_constant_at_nonzero_lambda, "a weighted characteristic has constant leading coefficient")?;
    let t = within(start, HEAT_BUDGET)?;
    Ok(format!(
        "q = 1 dim {}, q = 2 dim {}, {} weighted solutions over {} samples, {t}",
        q1.zero_lambda_dim,
        q2.zero_lambda_dim,
        q2.nonzero_lambda_solutions,
        lambdas.len() - 1
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("dimension formula (symkit schrodinger --qmax 4)", dimension_formula_via_cli),
        ("two-route agreement", two_routes_agree),
        ("exponential exclusion", exponential_exclusion),
        ("bidegree bound", bidegrees),
        ("adjoint pipeline on V^(2)", pipeline),
        ("differentiation consistency", differentiation),
        ("bracket closure", closure),
        ("property suites", properties),
        ("heat equation search", heat),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
