use nalgebra::Matrix4;
use proptest::prelude::*;

use nullfront::adsdist::dist_sq_jets;
use nullfront::curve::{catalog, CATALOG_NAMES};
use nullfront::expr::{BinOp, Expr, Func};
use nullfront::framed::{align_congruence, integrate_frame, standard_frame, uniform_grid};
use nullfront::geom4::{det4, pseudo_dot, triple_product, Vec4};
use nullfront::nullcone::{sigma_jets, transversality_det, FrontSheet, DEFAULT_TOL_DENOM};
use nullfront::FramedCurve;

fn vec4() -> impl Strategy<Value = Vec4> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(Vec4)
}

fn scale(vs: &[Vec4]) -> f64 {
    vs.iter().map(|v| v.max_abs().max(1.0)).product()
}

proptest! {
    #[test]
    fn triple_product_is_orthogonal(u in vec4(), v in vec4(), w in vec4()) {
        let t = triple_product(u, v, w);
        let tol = 1e-10 * scale(&[u, v, w]) * 10.0;
        for x in [u, v, w] {
            prop_assert!(pseudo_dot(t, x).abs() <= tol * x.max_abs().max(1.0));
        }
    }

    #[test]
    fn triple_product_is_alternating(u in vec4(), v in vec4(), w in vec4()) {
        let t = triple_product(u, v, w);
        let tol = 1e-10 * scale(&[u, v, w]);
        prop_assert!((t + triple_product(v, u, w)).max_abs() <= tol);
        prop_assert!((t + triple_product(u, w, v)).max_abs() <= tol);
        prop_assert!((t + triple_product(w, v, u)).max_abs() <= tol);
    }

    #[test]
    fn triple_product_pairs_to_determinant(u in vec4(), v in vec4(), w in vec4(), x in vec4()) {
        // <x, u x v x w> = det(x, u, v, w)
        let lhs = pseudo_dot(x, triple_product(u, v, w));
        let rhs = det4(x, u, v, w);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale(&[u, v, w, x]));
    }

    #[test]
    fn det4_matches_nalgebra(a in vec4(), b in vec4(), c in vec4(), d in vec4()) {
        let rows = [a, b, c, d];
        let m = Matrix4::from_fn(|i, j| rows[i][j]);
        prop_assert!((det4(a, b, c, d) - m.determinant()).abs() <= 1e-10 * scale(&rows));
    }

    #[test]
    fn pseudo_dot_is_bilinear(u in vec4(), v in vec4(), w in vec4(), a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let lhs = pseudo_dot(u * a + v * b, w);
        let rhs = a * pseudo_dot(u, w) + b * pseudo_dot(v, w);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale(&[u, v, w]) * 10.0);
        prop_assert_eq!(pseudo_dot(u, w), pseudo_dot(w, u));
    }
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::Var),
        Just(Expr::Pi),
        (0.0f64..100.0).prop_map(Expr::Const),
        (0u32..20).prop_map(|k| Expr::Const(f64::from(k))),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let ops = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow];
    let funcs = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
        Func::Exp,
        Func::Log,
        Func::Abs,
    ];
    leaf().prop_recursive(5, 48, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (prop::sample::select(funcs.to_vec()), inner.clone())
                .prop_map(|(f, e)| Expr::call(f, e)),
            (prop::sample::select(ops.to_vec()), inner.clone(), inner)
                .prop_map(|(op, a, b)| Expr::binary(op, a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn display_reparses_to_same_tree(e in expr()) {
        let text = e.to_string();
        let back: Expr = text.parse().unwrap();
        prop_assert_eq!(back, e, "{}", text);
    }
}

fn catalog_expressions() -> Vec<(String, Expr, (f64, f64))> {
    let mut out = Vec::new();
    for name in CATALOG_NAMES {
        let f = catalog(name).unwrap();
        for (which, spec) in [("gamma", &f.gamma), ("v1", &f.v1), ("v2", &f.v2)] {
            for (k, e) in spec.components.iter().enumerate() {
                out.push((format!("{name}.{which}[{k}]"), e.clone(), f.interval));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jets_match_central_differences(t in 0.02f64..0.98) {
        for (label, e, (a, b)) in catalog_expressions() {
            let s = a + t * (b - a);
            let j = e.eval_jet(s).unwrap();
            let h = 1e-5;
            let fd1 = (e.eval(s + h).unwrap() - e.eval(s - h).unwrap()) / (2.0 * h);
            prop_assert!((j.d(1) - fd1).abs() <= 1e-6 * j.d(1).abs().max(1.0), "{} at {}", label, s);
            let h = 1e-4;
            let fd2 = (e.eval(s + h).unwrap() - 2.0 * e.eval(s).unwrap() + e.eval(s - h).unwrap()) / (h * h);
            prop_assert!((j.d(2) - fd2).abs() <= 1e-5 * j.d(2).abs().max(1.0), "{} at {}", label, s);
            let d1 = |x: f64| e.eval_jet(x).unwrap().d(1);
            let fd3 = (d1(s + h) - 2.0 * d1(s) + d1(s - h)) / (h * h);
            prop_assert!((j.d(3) - fd3).abs() <= 1e-5 * j.d(3).abs().max(1.0), "{} at {}", label, s);
        }
    }

    #[test]
    fn frame_equations_hold(t in 0.0f64..1.0, which in 0usize..4) {
        let fc = FramedCurve::from_catalog(CATALOG_NAMES[which]).unwrap();
        let (a, b) = fc.interval();
        let s = a + t * (b - a);
        let f = fc.frame_at(s).unwrap();
        prop_assert!(f.gram_drift(fc.epsilon()) < 1e-9);
        let j = fc.frame_jets(s).unwrap();
        let c = fc.curvature_at(s).unwrap();
        let eps = fc.epsilon();
        let d = |v: &[nullfront::Jet4; 4]| Vec4(v.map(|x| x.d(1)));
        let residuals = [
            d(&j.gamma) - f.mu * c.alpha,
            d(&j.v1) - (f.v2 * c.ell + f.mu * c.m),
            d(&j.v2) - (f.v1 * c.ell + f.mu * c.n),
            d(&j.mu) - (f.gamma * c.alpha - f.v1 * (eps * c.m) + f.v2 * (eps * c.n)),
        ];
        for r in residuals {
            prop_assert!(r.max_abs() < 1e-7, "{:?} at s = {}", r, s);
        }
    }

    #[test]
    fn transversality_matches_sigma(t in 0.0f64..1.0, which in 0usize..3, plus in any::<bool>()) {
        let fc = FramedCurve::from_catalog(CATALOG_NAMES[which]).unwrap();
        let sheet = if plus { FrontSheet::Plus } else { FrontSheet::Minus };
        let (a, b) = fc.interval();
        let s = a + t * (b - a);
        let j = sigma_jets(&fc, s, sheet).unwrap();
        let den = j.denom.value();
        prop_assume!(den.abs() > 1e-2);
        let det = transversality_det(&fc, s, sheet, DEFAULT_TOL_DENOM).unwrap();
        let want = j.sigma.value() / (den * den);
        prop_assert!((det - want).abs() < 1e-8 * want.abs().max(1.0));
    }

    #[test]
    fn distance_value_identity(t in 0.0f64..1.0, p in -2.0f64..2.0, q in 0.0f64..6.3, r in 0.0f64..6.3) {
        let fc = FramedCurve::from_catalog("example2").unwrap();
        let s = t * 2.0 * std::f64::consts::PI;
        let v0 = Vec4::new(p.cosh() * q.cos(), p.cosh() * q.sin(), p.sinh() * r.cos(), p.sinh() * r.sin());
        let ev = dist_sq_jets(&fc, s, v0).unwrap();
        let g = fc.frame_at(s).unwrap().gamma;
        prop_assert!((ev.d[0] - (-2.0 - 2.0 * pseudo_dot(g, v0))).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integration_preserves_gram(k in prop::array::uniform4(-2.0f64..2.0), negative in any::<bool>()) {
        let eps = if negative { -1.0 } else { 1.0 };
        let states = integrate_frame(&k, standard_frame(0.0, eps), eps, 1.0, 1e-2, true).unwrap();
        for st in &states {
            prop_assert!(st.gram_drift(eps) < 1e-12);
        }
    }

    #[test]
    fn congruence_recovers_isometries(a in -1.0f64..1.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let boost = [
            [a.cosh(), 0.0, a.sinh(), 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [a.sinh(), 0.0, a.cosh(), 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let rot12 = Matrix4::new(
            b.cos(), -b.sin(), 0.0, 0.0,
            b.sin(), b.cos(), 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
        );
        let rot34 = Matrix4::new(
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, c.cos(), -c.sin(),
            0.0, 0.0, c.sin(), c.cos(),
        );
        let m = Matrix4::from_fn(|i, j| boost[i][j]) * rot12 * rot34;
        let arr: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]));
        let e1 = FramedCurve::from_catalog("example1").unwrap();
        let moved = e1.transformed(arr).unwrap();
        let grid = uniform_grid(-1.0, 1.0, 21);
        let cg = align_congruence(&e1, &moved, 0.25, &grid).unwrap();
        prop_assert!(cg.residual < 1e-8);
        prop_assert!(cg.isometry_defect < 1e-8);
    }
}
