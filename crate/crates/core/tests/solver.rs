use aqec_core::lp::{maximize, parse_lp, solve_feasibility, verify_certificate, write_lp, Optimum, Sense};
use aqec_core::{LpModel, SolverOptions, Status};
use proptest::prelude::*;

/// Best vertex of `max c.x, A x <= b, lo <= x <= hi` in two dimensions.
fn vertex_oracle(c: [f64; 2], rows: &[([f64; 2], f64)], lo: [f64; 2], hi: [f64; 2]) -> Option<f64> {
    let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
    lines.push(([1.0, 0.0], lo[0]));
    lines.push(([1.0, 0.0], hi[0]));
    lines.push(([0.0, 1.0], lo[1]));
    lines.push(([0.0, 1.0], hi[1]));
    let feasible = |x: [f64; 2]| {
        (0..2).all(|j| x[j] >= lo[j] - 1e-9 && x[j] <= hi[j] + 1e-9)
            && rows.iter().all(|(a, b)| a[0] * x[0] + a[1] * x[1] <= b + 1e-9)
    };
    let mut best: Option<f64> = None;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let ((a, p), (b, q)) = (lines[i], lines[j]);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() < 1e-12 {
                continue;
            }
            let x = [(p * b[1] - a[1] * q) / det, (a[0] * q - p * b[0]) / det];
            if feasible(x) {
                let v = c[0] * x[0] + c[1] * x[1];
                best = Some(best.map_or(v, |w: f64| w.max(v)));
            }
        }
    }
    best
}

fn build(c: &[f64], rows: &[(Vec<f64>, f64)], lo: &[f64], hi: &[f64]) -> LpModel {
    let mut m = LpModel::new();
    for j in 0..c.len() {
        let v = m.add_var(format!("x{j}"), lo[j], hi[j]);
        m.set_objective_coeff(v, c[j]);
    }
    for (k, (a, b)) in rows.iter().enumerate() {
        let coeffs = a.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect();
        m.add_le(format!("r{k}"), coeffs, *b).unwrap();
    }
    m
}

/// `y.b + sum_j sup_{x_j in box} (c - A^T y)_j x_j`, an upper bound for any
/// admissible `y`.
fn lagrangian_bound(model: &LpModel, y: &[f64]) -> f64 {
    let mut g: Vec<f64> = model.objective().to_vec();
    let mut val = 0.0;
    for (c, &yi) in model.constraints().iter().zip(y) {
        val += yi * c.rhs;
        for &(j, v) in &c.coeffs {
            g[j] -= yi * v;
        }
    }
    for (j, gj) in g.iter().enumerate() {
        val += if *gj > 0.0 { gj * model.upper()[j] } else { gj * model.lower()[j] };
    }
    val
}

fn small_lp() -> impl Strategy<Value = (Vec<f64>, Vec<(Vec<f64>, f64)>, Vec<f64>, Vec<f64>)> {
    (2usize..=50, 1usize..=30).prop_flat_map(|(nv, nr)| {
        (
            prop::collection::vec(-5.0f64..5.0, nv),
            prop::collection::vec((prop::collection::vec(-3.0f64..3.0, nv), -2.0f64..10.0), nr),
            prop::collection::vec(-2.0f64..0.0, nv),
            prop::collection::vec(0.5f64..4.0, nv),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_vertex_enumeration(
        c in prop::array::uniform2(-3.0f64..3.0),
        rows in prop::collection::vec((prop::array::uniform2(-3.0f64..3.0), -1.0f64..4.0), 0..6),
    ) {
        let (lo, hi) = ([-1.0, -2.0], [2.0, 1.5]);
        let model = build(
            &c,
            &rows.iter().map(|(a, b)| (a.to_vec(), *b)).collect::<Vec<_>>(),
            &lo,
            &hi,
        );
        let r = maximize(&model, &SolverOptions::default()).unwrap();
        match vertex_oracle(c, &rows, lo, hi) {
            Some(best) => {
                prop_assert_eq!(r.verdict.status, Status::Feasible);
                prop_assert!((r.value().unwrap() - best).abs() < 1e-7, "{:?} vs {}", r.value(), best);
            }
            None => prop_assert_eq!(r.verdict.status, Status::Infeasible),
        }
    }

    #[test]
    fn strong_duality((c, rows, lo, hi) in small_lp()) {
        let model = build(&c, &rows, &lo, &hi);
        let r = maximize(&model, &SolverOptions::default()).unwrap();
        match r.verdict.status {
            Status::Feasible => {
                let v = r.value().unwrap();
                let x = r.verdict.witness.as_ref().unwrap();
                prop_assert!(model.max_violation(x) < 1e-7);
                prop_assert!((model.objective_value(x) - v).abs() < 1e-7 * v.abs().max(1.0));
                let y = r.duals.as_ref().unwrap();
                prop_assert!(y.iter().all(|&yi| yi >= -1e-9));
                let bound = lagrangian_bound(&model, y);
                prop_assert!((bound - v).abs() < 1e-6 * v.abs().max(1.0), "dual {} primal {}", bound, v);
            }
            Status::Infeasible => {
                let cert = r.verdict.certificate.as_ref().unwrap();
                prop_assert!(verify_certificate(&model, &cert.multipliers, 1e-9).unwrap() > 1e-7);
            }
            Status::Numerical => prop_assert!(false, "numerical status on a small model"),
        }
    }

    #[test]
    fn certificates_verify_on_contradictions((c, mut rows, lo, hi) in small_lp(), k in 0usize..30, gap in 0.1f64..3.0) {
        let k = k % rows.len();
        let (a, b) = rows[k].clone();
        rows.push((a.iter().map(|v| -v).collect(), -b - gap));
        let model = build(&c, &rows, &lo, &hi);
        let v = solve_feasibility(&model, &SolverOptions::default()).unwrap();
        prop_assert_eq!(v.status, Status::Infeasible);
        let cert = v.certificate.unwrap();
        let margin = verify_certificate(&model, &cert.multipliers, 1e-9).unwrap();
        prop_assert!(margin > 1e-7);
        prop_assert!((margin - cert.margin).abs() < 1e-9 * margin.max(1.0));
        for (yi, row) in cert.multipliers.iter().zip(model.constraints()) {
            if row.sense == Sense::Le {
                prop_assert!(*yi <= 0.0);
            }
        }
    }

    #[test]
    fn invariant_under_rescaling((c, rows, lo, hi) in small_lp(), exps in prop::collection::vec(-4i32..=4, 80)) {
        let base = maximize(&build(&c, &rows, &lo, &hi), &SolverOptions::default()).unwrap();
        for t in 0..10 {
            let rs: Vec<(Vec<f64>, f64)> = rows
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let s = 10f64.powi(exps[(k + 7 * t) % exps.len()]);
                    (a.iter().map(|v| v * s).collect(), b * s)
                })
                .collect();
            let cs: Vec<f64> = (0..c.len()).map(|j| 10f64.powi(exps[(j + 3 * t + 40) % exps.len()] / 2)).collect();
            let scaled_rows: Vec<(Vec<f64>, f64)> = rs
                .iter()
                .map(|(a, b)| (a.iter().zip(&cs).map(|(v, s)| v * s).collect(), *b))
                .collect();
            let c2: Vec<f64> = c.iter().zip(&cs).map(|(v, s)| v * s).collect();
            let lo2: Vec<f64> = lo.iter().zip(&cs).map(|(v, s)| v / s).collect();
            let hi2: Vec<f64> = hi.iter().zip(&cs).map(|(v, s)| v / s).collect();
            let r = maximize(&build(&c2, &scaled_rows, &lo2, &hi2), &SolverOptions::default()).unwrap();
            prop_assert_eq!(r.verdict.status, base.verdict.status);
            if let (Some(a), Some(b)) = (r.value(), base.value()) {
                prop_assert!((a - b).abs() < 1e-6 * b.abs().max(1.0), "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn lp_text_round_trip((c, rows, lo, hi) in small_lp()) {
        let model = build(&c, &rows, &lo, &hi);
        let back = parse_lp(&write_lp(&model)).unwrap();
        prop_assert_eq!(back.num_vars(), model.num_vars());
        prop_assert_eq!(back.num_constraints(), model.num_constraints());
        let a = maximize(&model, &SolverOptions::default()).unwrap();
        let b = maximize(&back, &SolverOptions::default()).unwrap();
        prop_assert_eq!(a.verdict.status, b.verdict.status);
        if let (Some(x), Some(y)) = (a.value(), b.value()) {
            prop_assert!((x - y).abs() < 1e-7 * x.abs().max(1.0));
        }
    }
}

#[test]
fn unbounded_objective_is_reported() {
    let mut m = LpModel::new();
    let x = m.add_var("x", 0.0, f64::INFINITY);
    let y = m.add_var("y", 0.0, f64::INFINITY);
    m.set_objective_coeff(x, 1.0);
    m.add_le("r", vec![(x, -1.0), (y, 1.0)], 1.0).unwrap();
    let r = maximize(&m, &SolverOptions::default()).unwrap();
    assert_eq!(r.optimum, Some(Optimum::Unbounded));
}

#[test]
fn identical_inputs_give_identical_output() {
    let rows: Vec<(Vec<f64>, f64)> = (0..20)
        .map(|k| ((0..30).map(|j| ((k * 31 + j * 17) % 11) as f64 - 5.0).collect(), 3.0 + k as f64))
        .collect();
    let c: Vec<f64> = (0..30).map(|j| (j % 7) as f64 - 3.0).collect();
    let model = build(&c, &rows, &[0.0; 30], &[2.0; 30]);
    let a = maximize(&model, &SolverOptions::default()).unwrap();
    let b = maximize(&model, &SolverOptions::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.verdict.to_json(a.value()), b.verdict.to_json(b.value()));
}
