use std::f64::consts::{FRAC_PI_4, PI};

use nullfront::adsdist::{dist_sq_jets, locus_point};
use nullfront::curve::CATALOG_NAMES;
use nullfront::framed::uniform_grid;
use nullfront::nullcone::{
    find_singularities, front_triple, jacobian_rank, null_direction_defect, sigma_jets,
    singular_lambda, transversality_det, FrontSheet, Origin, SingularClass, Tolerances,
    DEFAULT_TOL_DENOM,
};
use nullfront::FramedCurve;

fn fc(name: &str) -> FramedCurve {
    FramedCurve::from_catalog(name).unwrap()
}

/// Grid points whose front denominator is comfortably away from zero.
fn regular_points(fc: &FramedCurve, sheet: FrontSheet, n: usize) -> Vec<f64> {
    let (a, b) = fc.interval();
    uniform_grid(a, b, n)
        .into_iter()
        .filter(|&s| sigma_jets(fc, s, sheet).unwrap().denom.value().abs() > 1e-2)
        .collect()
}

#[test]
fn null_directions() {
    for name in CATALOG_NAMES {
        for sheet in FrontSheet::BOTH {
            assert!(null_direction_defect(&fc(name), sheet, 100).unwrap() < 1e-9);
        }
    }
}

#[test]
fn transversality_oracle_on_grid() {
    for name in ["example1", "example2", "example3"] {
        let c = fc(name);
        for sheet in FrontSheet::BOTH {
            for s in regular_points(&c, sheet, 100) {
                let j = sigma_jets(&c, s, sheet).unwrap();
                let d = j.denom.value();
                let det = transversality_det(&c, s, sheet, DEFAULT_TOL_DENOM).unwrap();
                assert!(
                    (det - j.sigma.value() / (d * d)).abs() < 1e-8,
                    "{name} {sheet} {s}"
                );
            }
        }
    }
}

#[test]
fn triple_product_detects_singular_set() {
    let c = fc("example1");
    for sheet in FrontSheet::BOTH {
        for s in regular_points(&c, sheet, 50) {
            let l = singular_lambda(&c, s, sheet, DEFAULT_TOL_DENOM).unwrap();
            assert!(front_triple(&c, s, l, sheet).unwrap().max_abs() < 1e-7);
            for off in [l - 0.1, l + 0.1] {
                assert!(
                    front_triple(&c, s, off, sheet).unwrap().max_abs() > 1e-3,
                    "{s}"
                );
            }
        }
    }
}

#[test]
fn jacobian_rank_drops_on_locus() {
    let c = fc("example3");
    for s in regular_points(&c, FrontSheet::Plus, 50) {
        let l = singular_lambda(&c, s, FrontSheet::Plus, DEFAULT_TOL_DENOM).unwrap();
        assert_eq!(
            jacobian_rank(&c, s, l, FrontSheet::Plus).unwrap().0,
            1,
            "{s}"
        );
        assert_eq!(
            jacobian_rank(&c, s, l + 0.1, FrontSheet::Plus).unwrap().0,
            2,
            "{s}"
        );
    }
}

#[test]
fn area_density_is_nondegenerate_where_classified() {
    let c = fc("example2");
    let scan = find_singularities(
        &c,
        FrontSheet::Plus,
        (0.0, 2.0 * PI),
        128,
        Tolerances::default(),
    )
    .unwrap();
    for p in scan.points {
        let d = sigma_jets(&c, p.report.s0, FrontSheet::Plus)
            .unwrap()
            .denom
            .value();
        assert!(d.abs() > DEFAULT_TOL_DENOM);
    }
}

#[test]
fn wavefront_ladder_on_locus() {
    for name in ["example1", "example2", "example3"] {
        let c = fc(name);
        for s in regular_points(&c, FrontSheet::Plus, 50) {
            let v0 = locus_point(&c, s, FrontSheet::Plus, DEFAULT_TOL_DENOM).unwrap();
            let ev = dist_sq_jets(&c, s, v0).unwrap();
            assert!(ev.satisfied_levels >= Some(2), "{name} {s} {:?}", ev.d);
            let j = sigma_jets(&c, s, FrontSheet::Plus).unwrap();
            // at a root of alpha the locus point is gamma(s) itself, which
            // climbs further up the ladder whatever sigma is
            if j.sigma.value().abs() > 1e-4 && j.alpha.value().abs() > 1e-6 {
                assert_eq!(ev.satisfied_levels, Some(2), "{name} {s}");
            }
        }
    }
}

#[test]
fn wavefront_ladder_at_sigma_roots() {
    let tol = Tolerances::default();
    for (name, range) in [("example2", (0.0, 2.0 * PI)), ("example3", (-1.0, 1.0))] {
        let c = fc(name);
        let scan = find_singularities(&c, FrontSheet::Plus, range, 200, tol).unwrap();
        for p in scan.points.iter().filter(|p| p.origin != Origin::AlphaRoot) {
            let v0 = locus_point(&c, p.report.s0, FrontSheet::Plus, DEFAULT_TOL_DENOM).unwrap();
            let ev = dist_sq_jets(&c, p.report.s0, v0).unwrap();
            assert!(ev.satisfied_levels >= Some(3), "{name} {:?}", p.report);
            assert_eq!(p.report.class, SingularClass::Swallowtail);
            if p.origin == Origin::SigmaRoot {
                // sigma' != 0, so the ladder stops below d''''
                assert_eq!(ev.satisfied_levels, Some(3), "{name} {:?}", ev.d);
            }
        }
    }
}

#[test]
fn example2_swallowtail_at_quarter_turn() {
    let c = fc("example2");
    let j = sigma_jets(&c, FRAC_PI_4, FrontSheet::Plus).unwrap();
    assert!(j.sigma.value().abs() < 1e-12);
    assert!(j.sigma.d(1).abs() > 1.0);
}
