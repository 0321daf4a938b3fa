use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use symkit::jet::{lie_bracket, GenVectorField};
use symkit::linalg::ExactMatrix;
use symkit::linop::LinDiffOp;
use symkit::{GaussRat, VarContext, VarId};
use symkit_cli::ast::{Declarations, Expr, LambdaItem, ProblemFile, Task, TaskKind};
use symkit_cli::{parse_expr, parse_problem};

fn symkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

// ---- round trip ----

const NAMES: &[&str] = &["t", "x", "y", "u", "psi", "alpha_1"];

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(NAMES).prop_map(String::from)
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u64..1000).prop_map(|n| Expr::Num(GaussRat::from(n as i64))),
        Just(Expr::Num("123456789012345678901234567890".parse().unwrap())),
        Just(Expr::I),
        name().prop_map(Expr::Var),
        (name(), prop::collection::vec(name(), 1..4)).prop_map(|(unknown, vars)| Expr::Deriv { unknown, vars }),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            (inner, 0u32..5).prop_map(|(a, e)| Expr::Pow(Box::new(a), e)),
        ]
    })
}

fn lambda_item() -> impl Strategy<Value = LambdaItem> {
    prop_oneof![
        expr().prop_map(LambdaItem::Scalar),
        prop::collection::vec(expr(), 2..4).prop_map(LambdaItem::Tuple),
    ]
}

fn task() -> impl Strategy<Value = Task> {
    (
        prop::bool::ANY,
        prop::option::of(0usize..6),
        prop::option::of(prop::collection::vec(0u32..9, 0..4)),
        prop::option::of(prop::collection::vec(lambda_item(), 0..3)),
        prop::bool::ANY,
    )
        .prop_map(|(evo, order, caps, lambda, verify)| Task {
            kind: if evo { TaskKind::Evolution } else { TaskKind::Solve },
            order,
            caps,
            lambda,
            verify,
        })
}

fn problem() -> impl Strategy<Value = ProblemFile> {
    (
        prop::collection::vec(name(), 1..3),
        prop::collection::vec(name(), 1..3),
        prop::collection::vec(name(), 0..3),
        expr(),
        expr(),
        prop::option::of(task()),
    )
        .prop_map(|(vars, unknowns, translations, lhs, rhs, task)| ProblemFile {
            decls: Declarations {
                vars,
                unknowns,
                translations,
            },
            lhs,
            rhs,
            task,
        })
}

proptest! {
    #[test]
    fn expressions_round_trip(e in expr()) {
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn problems_round_trip(p in problem()) {
        let text = p.to_string();
        let back = parse_problem(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(back.to_string(), text);
    }
}

// ---- binary ----

const SCHRODINGER: &str = "# free Schrodinger equation
vars t, x;
unknowns psi;
translations t, x;
eq i*D[psi, t] + D[psi, x, x] = 0;
task solve order=2;
";

#[test]
fn json_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "se.pde", SCHRODINGER);
    let a = symkit(&["solve", &f, "--verify", "--json", "-"]);
    let b = symkit(&["solve", &f, "--verify", "--json", "-"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let out = dir.path().join("out.json");
    let c = symkit(&["solve", &f, "--verify", "--json", out.to_str().unwrap()]);
    assert!(c.status.success());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["mode"], "operator");
    assert_eq!(v["runs"][0]["dimension"], 6);
    assert_eq!(v["runs"][0]["verified"], true);
    let dims: Vec<u64> = v["dimensions"].as_array().unwrap().iter().map(|d| d["dimension"].as_u64().unwrap()).collect();
    assert_eq!(dims, [1, 3, 6]);
    assert_eq!(v["structure"]["verification"]["reconstruction"], true);
    // numbers are exact strings
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"-1/2*i\""), "{text}");
}

#[test]
fn flags_override_the_task_block() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "se.pde", SCHRODINGER);
    let out = symkit(&["solve", &f, "-q", "1", "--lambda", "0, (1, 0)", "--json", "-"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], 1);
    assert_eq!(v["runs"][0]["dimension"], 3);
    assert_eq!(v["runs"][1]["lambda"], serde_json::json!(["1", "0"]));
    assert_eq!(v["runs"][1]["dimension"], 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.pde", "vars t, y; unknowns u;\neq D[u,t] = ;\n");
    let out = symkit(&["solve", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("2:13"), "{err}");

    let undeclared = write(dir.path(), "u.pde", "vars t; unknowns u; eq D[u,t] = D[v,t,t];\n");
    assert_eq!(symkit(&["solve", &undeclared]).status.code(), Some(2));
    assert_eq!(symkit(&["solve", "/nonexistent.pde"]).status.code(), Some(2));
    assert_eq!(symkit(&["schrodinger", "--qmax", "x"]).status.code(), Some(2));

    let heat = write(dir.path(), "heat.pde", "vars t, y; unknowns u; translations y; eq D[u,t] = D[u,y,y];\n");
    let out = symkit(&["evolution", &heat, "-q", "1", "--verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(symkit(&["evolution", &heat, "--caps", "1,2"]).status.code(), Some(2));
}

#[test]
fn adjoint_matrices_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "se.pde", SCHRODINGER);
    let out = symkit(&["adjoint", &f, "-q", "1", "--json", "-"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["adjoint"]["t"]["char_poly"], "x^3");
    assert_eq!(v["adjoint"]["x"]["char_poly"], "x^3");
    let m = |z: &str| -> ExactMatrix {
        ExactMatrix::from_rows(
            v["adjoint"][z]["matrix"]
                .as_array()
                .unwrap()
                .iter()
                .map(|r| r.as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse().unwrap()).collect())
                .collect(),
        )
    };
    let (gt, gx) = (m("t"), m("x"));
    assert_eq!(&gt * &gx, &gx * &gt);
}

#[test]
fn operator_bracket_matches_direct_commutator() {
    let dir = tempfile::tempdir().unwrap();
    let decl = "vars t, x; unknowns psi; translations t, x;\n";
    let a = write(dir.path(), "a.sym", &format!("{decl}operator x*psi + 2*i*t*D[psi, x];\n"));
    let b = write(dir.path(), "b.sym", &format!("{decl}operator t*D[psi, x, x] - x^2*psi;\n"));
    let out = symkit(&["bracket", &a, &b, "--json", "-"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    let ctx = VarContext::independents(&["t", "x"], &["t", "x"]).unwrap();
    let var = |k| LinDiffOp::multiplication(symkit::ExpPoly::var(&ctx, VarId(k)));
    let dx = LinDiffOp::partial_op(&ctx, VarId(1));
    let ga = var(1).add(&var(0).compose(&dx).unwrap().scale(&(&GaussRat::from_int(2) * &GaussRat::i())));
    let gb = var(0)
        .compose(&LinDiffOp::derivative(&ctx, vec![0, 2]))
        .unwrap()
        .sub(&var(1).compose(&var(1)).unwrap());
    let direct = ga.commutator(&gb).unwrap();
    assert_eq!(v["kind"], "operator");
    assert_eq!(v["result"], direct.to_json());
    assert_eq!(v["rendered"], direct.to_string());
}

#[test]
fn characteristic_bracket_matches_direct_lie_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let decl = "vars t, y; unknowns u;\n";
    let a = write(dir.path(), "a.sym", &format!("{decl}characteristic 2*t*D[u,y] + y*u;\n"));
    let b = write(dir.path(), "b.sym", &format!("{decl}characteristic u*D[u,y,y] - D[u,y]^2/2;\n"));
    let out = symkit(&["bracket", &a, &b, "--json", "-"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    let ctx = symkit::jet::JetContext::new(&["t", "y"], &["u"], 4, &[]).unwrap();
    let p = |n: &str| ctx.poly_var(ctx.var(n).unwrap());
    let e1 = &(&p("t") * &p("u_y")).scale(&GaussRat::from_int(2)) + &(&p("y") * &p("u"));
    let e2 = &(&p("u") * &p("u_yy")) - &(&p("u_y") * &p("u_y")).scale(&GaussRat::from_frac(1, 2));
    let q1 = GenVectorField::evolutionary(&ctx, vec![e1]).unwrap();
    let q2 = GenVectorField::evolutionary(&ctx, vec![e2]).unwrap();
    let direct = lie_bracket(&q1, &q2).unwrap();
    assert_eq!(v["kind"], "characteristic");
    assert_eq!(v["rendered"], direct.eta()[0].to_string());
    assert_eq!(v["result"][0], direct.eta()[0].to_json());
}

#[test]
fn mixed_bracket_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.sym", "vars t, y; unknowns u; characteristic D[u,y];\n");
    let b = write(dir.path(), "b.sym", "vars t, y; unknowns u; operator D[u,y];\n");
    assert_eq!(symkit(&["bracket", &a, &b]).status.code(), Some(2));
}
