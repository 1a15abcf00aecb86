use proptest::prelude::*;
use wrladder::mna::*;
use wrladder::solver::{make_partition, TcKind, WrSolver};

#[derive(Debug, Clone)]
enum El {
    R(f64, usize, Option<usize>),
    C(f64, usize),
}

fn stamp_all(order: usize, els: &[El]) -> StampMatrix {
    let mut sm = StampMatrix::new(order);
    for e in els {
        match *e {
            El::R(r, p, q) => sm.stamp_resistor(r, Some(p), q).unwrap(),
            El::C(c, p) => sm.stamp_capacitor(c, Some(p), None).unwrap(),
        }
    }
    sm
}

// a chain netlist: every node grounded through C, series resistors between
// neighbours, plus random extra grounded resistors
fn chain(dyadic: bool) -> impl Strategy<Value = (usize, Vec<El>)> {
    let value = move || -> BoxedStrategy<f64> {
        if dyadic {
            (1u32..64).prop_map(|k| 1.0 / k.next_power_of_two() as f64 * 4.0).boxed()
        } else {
            (1e-3f64..1e3).boxed()
        }
    };
    (3usize..12).prop_flat_map(move |n| {
        let caps = proptest::collection::vec(value(), n);
        let series = proptest::collection::vec(value(), n - 1);
        let extra = proptest::collection::vec((0..n, value()), 0..6);
        (Just(n), caps, series, extra).prop_map(|(n, caps, series, extra)| {
            let mut els: Vec<El> = caps.iter().enumerate().map(|(i, &c)| El::C(c, i)).collect();
            els.extend(series.iter().enumerate().map(|(i, &r)| El::R(r, i, Some(i + 1))));
            els.extend(extra.iter().map(|&(i, r)| El::R(r, i, None)));
            (n, els)
        })
    })
}

fn shuffled(els: &[El], seed: u64) -> Vec<El> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut v = els.to_vec();
    v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    v
}

proptest! {
    #[test]
    fn stamping_order_does_not_matter_for_exact_values((n, els) in chain(true), seed in any::<u64>()) {
        let a = stamp_all(n, &els);
        let b = stamp_all(n, &shuffled(&els, seed));
        prop_assert_eq!(a.m_entries(), b.m_entries());
        prop_assert_eq!(a.k_entries(), b.k_entries());
        prop_assert_eq!(a.assemble().unwrap(), b.assemble().unwrap());
    }

    #[test]
    fn stamping_order_changes_only_rounding((n, els) in chain(false), seed in any::<u64>()) {
        let a = stamp_all(n, &els);
        let b = stamp_all(n, &shuffled(&els, seed));
        for (k, v) in a.k_entries() {
            let w = b.k_entries()[k];
            prop_assert!((v - w).abs() <= 1e-14 * v.abs().max(w.abs()));
        }
        prop_assert_eq!(a.m_entries(), b.m_entries());
    }

    #[test]
    fn rc_stamps_are_symmetric((n, els) in chain(false)) {
        let sm = stamp_all(n, &els);
        let k = sm.dense_k();
        let m = sm.dense_m();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(k[i][j], k[j][i]);
                prop_assert_eq!(m[i][j], m[j][i]);
            }
        }
    }

    #[test]
    fn uniform_ladder_interior_rows(r in 1e-3f64..1e4, c in 1e-13f64..1e-3, eps in 0.0f64..0.5, n in 3usize..40) {
        let spec = CircuitSpec::new(r, c, eps, n).unwrap();
        let ode = build_rc_ladder(&spec, BoundaryClosure::Uniform).unwrap();
        let a = spec.a();
        for i in 1..n - 1 {
            let prod = ode.sub[i - 1] * ode.sup[i];
            prop_assert!((prod - a * a).abs() <= 4.0 * f64::EPSILON * a * a);
            let b = -(2.0 + eps) * a;
            prop_assert!((ode.diag[i] - b).abs() <= 4.0 * f64::EPSILON * b.abs());
        }
    }

    #[test]
    fn heat_limit(n in 3usize..50, dx in 1e-3f64..1.0) {
        let heat = heat_equation_system(n, dx).unwrap();
        let ladder = build_rc_ladder(&CircuitSpec::new(dx, dx, 0.0, n).unwrap(), BoundaryClosure::Uniform).unwrap();
        let scale = 1.0 / (dx * dx);
        for i in 1..n - 1 {
            prop_assert!((heat.diag[i] - ladder.diag[i]).abs() <= 4.0 * f64::EPSILON * 2.0 * scale);
            prop_assert!((heat.sub[i - 1] - ladder.sub[i - 1]).abs() <= 4.0 * f64::EPSILON * scale);
            prop_assert!((heat.sup[i] - ladder.sup[i]).abs() <= 4.0 * f64::EPSILON * scale);
        }
    }
}

#[test]
fn dyadic_ladder_rows_are_exact() {
    let spec = CircuitSpec::new(1.0, 1.0, 0.5, 8).unwrap();
    let ode = build_rc_ladder(&spec, BoundaryClosure::Uniform).unwrap();
    for i in 1..7 {
        assert_eq!(ode.sub[i - 1] * ode.sup[i], 1.0);
        assert_eq!(ode.diag[i], -2.5);
    }
}

/// Piece matrices of a two-way split, rebuilt from stamps: the piece's own
/// ladder (the series resistor to the phantom node stamps like one to ground)
/// plus the interface branch of conductance `−1/(R(1+α))` on the left and
/// `−1/(R(1−β))` on the right.
fn stamped_pieces(spec: &CircuitSpec, overlap: usize, alpha: f64, beta: f64) -> (TridiagonalOde, TridiagonalOde) {
    let n = spec.node_count;
    let plan = make_partition(n, 2, overlap, TcKind::Dirichlet).unwrap();
    let piece = |len: usize| ladder_stamps(&CircuitSpec { node_count: len, ..*spec }, BoundaryClosure::Uniform).unwrap();
    let mut left = piece(plan.pieces[0].len());
    let last = plan.pieces[0].len() - 1;
    left.stamp_conductance(-1.0 / (spec.resistance * (1.0 + alpha)), Some(last), None).unwrap();
    let mut right = piece(plan.pieces[1].len());
    right.stamp_conductance(-1.0 / (spec.resistance * (1.0 - beta)), Some(0), None).unwrap();
    (left.assemble().unwrap(), right.assemble().unwrap())
}

fn solver_pieces(spec: &CircuitSpec, overlap: usize, alpha: f64, beta: f64) -> (TridiagonalOde, TridiagonalOde) {
    let sys = build_rc_ladder(spec, BoundaryClosure::Uniform).unwrap();
    let n = spec.node_count;
    let plan = make_partition(n, 2, overlap, TcKind::Optimized { alpha, beta }).unwrap();
    let s = WrSolver::new(&plan, &sys, &vec![0.0; n], 0.5, 2, 0.0).unwrap();
    (s.piece_system(0).clone(), s.piece_system(1).clone())
}

#[test]
fn owr_pieces_equal_extra_resistor_stamps_exactly() {
    for (alpha, beta) in [(1.0, -1.0), (0.5, -3.0), (3.0, -0.5), (0.25, -0.25)] {
        for overlap in [0, 1, 2] {
            let spec = CircuitSpec::new(1.0, 1.0, 0.5, 16).unwrap();
            let (sl, sr) = stamped_pieces(&spec, overlap, alpha, beta);
            let (pl, pr) = solver_pieces(&spec, overlap, alpha, beta);
            assert_eq!(sl.diag, pl.diag, "alpha={alpha} n={overlap}");
            assert_eq!(sl.sub, pl.sub);
            assert_eq!(sl.sup, pl.sup);
            assert_eq!(sr.diag, pr.diag, "beta={beta} n={overlap}");
            assert_eq!(sr.sub, pr.sub);
            assert_eq!(sr.sup, pr.sup);
        }
    }
}

fn ulps(x: f64, y: f64) -> u64 {
    (x.to_bits() as i64 - y.to_bits() as i64).unsigned_abs()
}

proptest! {
    #[test]
    fn owr_pieces_match_stamps_to_rounding(
        r in 1.0f64..1e4,
        c in 1e-13f64..1e-6,
        eps in 1e-6f64..0.1,
        alpha in 1e-3f64..10.0,
        beta in -10.0f64..-1e-3,
        overlap in 0usize..3,
    ) {
        let spec = CircuitSpec::new(r, c, eps, 12).unwrap();
        let (sl, sr) = stamped_pieces(&spec, overlap, alpha, beta);
        let (pl, pr) = solver_pieces(&spec, overlap, alpha, beta);
        for (x, y) in sl.diag.iter().zip(&pl.diag).chain(sr.diag.iter().zip(&pr.diag)) {
            prop_assert!(ulps(*x, *y) <= 4, "{} vs {}", x, y);
        }
        prop_assert_eq!(&sl.sub, &pl.sub);
        prop_assert_eq!(&sr.sup, &pr.sup);
    }
}

#[test]
fn netlist_round_trip_matches_ladder() {
    let mut text = String::from("* five node ladder, R=2, C=0.5, leak R/eps with eps=0.25\n");
    for k in 1..=5 {
        text.push_str(&format!("C{k} {k} 0 0.5\nRL{k} {k} 0 8\n"));
    }
    for k in 1..5 {
        text.push_str(&format!("R{k} {k} {} 2\n", k + 1));
    }
    text.push_str("RA 1 0 2\nRB 5 0 2\nI1 0 1 1\n");
    let ode = Netlist::parse(&text).unwrap().assemble().unwrap();
    let spec = CircuitSpec::new(2.0, 0.5, 0.25, 5).unwrap();
    let ladder = build_rc_ladder(&spec, BoundaryClosure::Uniform).unwrap();
    assert_eq!(ode.diag, ladder.diag);
    assert_eq!(ode.sub, ladder.sub);
    assert_eq!(ode.sup, ladder.sup);
    // 1 A into node 1 over C = 0.5
    assert_eq!(ode.source_at(0.0), vec![2.0, 0.0, 0.0, 0.0, 0.0]);
}
