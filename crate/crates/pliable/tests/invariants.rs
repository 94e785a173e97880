//! Full log-replay validation of both encoders across instance families:
//! every recorded quantity is recomputed from the instance and the round
//! logs, and every structural guarantee (peeling order, grouping boundaries,
//! greedy choices, per-group satisfaction fractions, weight decay, final
//! decodability, hard length bounds) is asserted.

use pliable::greedy::{encode, encode_with_options};
use pliable::greedy_t::{encode_t, encode_t_with_options};
use pliable::instance::{generate, GenSpec, Instance};
use pliable::testkit::check_encode_invariants;

#[test]
fn single_request_random_instances() {
    for (n, m, p) in [(64usize, 23usize, 0.3), (128, 37, 0.3), (40, 12, 0.6)] {
        for seed in 0..5 {
            let inst = generate(&GenSpec::Random { m, n, p, t: 1, seed }).unwrap();
            let res = encode(&inst).unwrap();
            check_encode_invariants(&inst, &res).unwrap();
        }
    }
}

#[test]
fn multi_request_random_instances() {
    for (n, t) in [(48usize, 2usize), (48, 3), (64, 5), (32, 8)] {
        for seed in 0..3 {
            let inst = generate(&GenSpec::Random {
                m: 24,
                n,
                p: 0.45,
                t,
                seed: 1_000 + seed,
            })
            .unwrap();
            let res = encode_t(&inst).unwrap();
            check_encode_invariants(&inst, &res).unwrap();
        }
    }
}

#[test]
fn relaxed_variant_both_encoders() {
    let inst = generate(&GenSpec::Random {
        m: 20,
        n: 40,
        p: 0.4,
        t: 1,
        seed: 7,
    })
    .unwrap();
    check_encode_invariants(&inst, &encode_with_options(&inst, true).unwrap()).unwrap();

    let inst = generate(&GenSpec::Random {
        m: 20,
        n: 40,
        p: 0.5,
        t: 4,
        seed: 8,
    })
    .unwrap();
    check_encode_invariants(&inst, &encode_t_with_options(&inst, true).unwrap()).unwrap();
}

#[test]
fn structured_families() {
    for m in [3usize, 6, 9] {
        let inst = generate(&GenSpec::Complete { m }).unwrap();
        check_encode_invariants(&inst, &encode(&inst).unwrap()).unwrap();
    }
    for (m, t) in [(5usize, 2usize), (7, 3), (6, 6)] {
        let inst = generate(&GenSpec::CompleteT { m, t }).unwrap();
        check_encode_invariants(&inst, &encode_t(&inst).unwrap()).unwrap();
    }
    let inst = generate(&GenSpec::Heterogeneous {
        m: 30,
        n: 50,
        group_probs: vec![0.05, 0.15, 0.25, 0.35, 0.45],
        t: 1,
        seed: 3,
    })
    .unwrap();
    check_encode_invariants(&inst, &encode(&inst).unwrap()).unwrap();

    // duplicate request sets are tolerated by both encoders
    let inst = Instance::new(
        6,
        2,
        vec![vec![0, 1, 2], vec![0, 1, 2], vec![3, 4], vec![3, 4]],
    )
    .unwrap();
    check_encode_invariants(&inst, &encode_t(&inst).unwrap()).unwrap();
}

#[test]
fn skewed_and_edge_shapes() {
    // one dominant message
    let mut requests: Vec<Vec<usize>> = (0..10).map(|i| vec![0, 1 + (i % 5)]).collect();
    requests.push(vec![0]);
    let inst = Instance::new(6, 1, requests).unwrap();
    check_encode_invariants(&inst, &encode(&inst).unwrap()).unwrap();

    // active-count a power of two, with degree-1 messages (grouping clamp);
    // disjoint singleton requests collapse to a single all-ones row
    let inst = Instance::new(4, 1, vec![vec![0], vec![1], vec![2], vec![3]]).unwrap();
    let res = encode(&inst).unwrap();
    check_encode_invariants(&inst, &res).unwrap();
    assert_eq!(res.rounds[0].groups.len(), 1);
    assert_eq!(res.rounds[0].groups[0].s, 2);
    assert_eq!(res.reduced_len, 1);

    // single client, many requests
    let inst = Instance::new(8, 5, vec![(0..8).collect()]).unwrap();
    check_encode_invariants(&inst, &encode_t(&inst).unwrap()).unwrap();

    // more messages than clients
    let inst = generate(&GenSpec::Random {
        m: 50,
        n: 10,
        p: 0.3,
        t: 1,
        seed: 77,
    })
    .unwrap();
    check_encode_invariants(&inst, &encode(&inst).unwrap()).unwrap();
}

#[test]
fn greedy_never_beats_the_exhaustive_optimum() {
    use pliable::decode::verify;
    use pliable::oracle::optimal_code_length;
    for seed in 0..20 {
        for (n, m) in [(10usize, 5usize), (14, 6), (8, 7)] {
            let inst = generate(&GenSpec::Random {
                m,
                n,
                p: 0.35,
                t: 1,
                seed: 9_000 + seed,
            })
            .unwrap();
            let res = encode(&inst).unwrap();
            assert!(verify(&res.reduced, &inst).unwrap().all_satisfied());
            let opt = optimal_code_length(&inst, 2, m).unwrap();
            assert!(
                res.reduced_len >= opt.optimal_len,
                "greedy {} below optimum {} (n = {}, m = {}, seed = {})",
                res.reduced_len,
                opt.optimal_len,
                n,
                m,
                seed
            );
        }
    }
}

/// A hand-built run that walks a client out of the satisfied set and back
/// in. Within one dyadic group the messages get sub-vectors x=(1,0),
/// y=(0,1), z=(1,1), z, x in that order; client T (requesting messages
/// 3, 4, 5) sees z twice and is unsatisfiable until the final x rescues
/// her. The default variant decodes her in round one; the relaxed variant
/// keeps her out once she drops and needs a second round just for her.
#[test]
fn knocked_out_client_returns_unless_relaxed() {
    let mut requests: Vec<Vec<usize>> = vec![
        vec![0, 2],    // P: votes z at message 2
        vec![1, 2],    // Q: votes z at message 2
        vec![0, 3],    // R1: votes z at message 3
        vec![0, 3],    // R2
        vec![1, 3],    // S1: votes z at message 3
        vec![1, 3],    // S2
        vec![0, 1],    // G: forces y on message 1
        vec![2, 3, 4], // T: satisfied, knocked out, re-satisfied
        vec![4],       // F
    ];
    // single-message fillers shape the peeling into the order 0..5 with
    // effective degrees 12,10,8,7,7,4 over n = 48 active clients, putting
    // messages 0-4 into one dyadic group and message 5 into the next
    for (msg, count) in [(0usize, 8usize), (1, 7), (2, 7), (3, 7), (4, 6), (5, 4)] {
        for _ in 0..count {
            requests.push(vec![msg]);
        }
    }
    let inst = Instance::new(6, 1, requests).unwrap();

    let res = encode(&inst).unwrap();
    check_encode_invariants(&inst, &res).unwrap();
    assert_eq!(res.rounds.len(), 1);
    let round = &res.rounds[0];
    assert_eq!(round.order, vec![0, 1, 2, 3, 4, 5]);
    assert_eq!(round.eff_weight, vec![12, 10, 8, 7, 7, 4]);
    assert_eq!(round.groups.len(), 2);
    let g = &round.groups[0];
    assert_eq!(g.s, 3);
    assert_eq!(g.messages, vec![0, 1, 2, 3, 4]);
    let chosen: Vec<usize> = g.steps.iter().map(|s| s.chosen).collect();
    assert_eq!(chosen, vec![0, 1, 2, 2, 0], "x, y, z, z, x");
    // client T (index 7) drops out at message 3 and returns at message 4
    assert_eq!(g.steps[3].moved_out, 1);
    assert!(g.sat_end.contains(&7));
    assert!(g.decoded.contains(&(7, 4)));
    assert_eq!(round.groups[1].messages, vec![5]);
    assert_eq!(res.raw_len, 4);
    assert_eq!(res.reduced_len, 3);

    let relaxed = encode_with_options(&inst, true).unwrap();
    check_encode_invariants(&inst, &relaxed).unwrap();
    assert_eq!(relaxed.rounds.len(), 2, "the dropped client needs a second round");
    assert!(!relaxed.rounds[0].groups[0].sat_end.contains(&7));
    assert_eq!(relaxed.rounds[1].active, vec![7]);
    assert_eq!(relaxed.raw_len, 6);
    assert_ne!(res.code, relaxed.code);
}

/// Lifting a scalar code to L sub-messages per message (each column a_j
/// becomes the block a_j ⊗ e_1, ..., a_j ⊗ e_L) changes no decodability:
/// the block criterion on the lift equals the column criterion on the
/// original.
#[test]
fn scalar_codes_lift_to_vector_codes_unchanged() {
    use pliable::decode::{decodable_set, vector_decodable_set, VectorCode};
    use pliable::gf::Matrix;
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x715F);
    for _ in 0..150 {
        let q = if rng.gen_bool(0.5) { 2 } else { 3 };
        let k = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=4);
        let l = rng.gen_range(1..=3);
        let scalar_rows: Vec<Vec<u32>> = (0..k)
            .map(|_| (0..m).map(|_| rng.gen_range(0..q)).collect())
            .collect();
        let scalar = Matrix::from_rows(q, m, scalar_rows.clone()).unwrap();
        let lifted_rows: Vec<Vec<u32>> = (0..k * l)
            .map(|row| {
                let (kk, ll) = (row / l, row % l);
                (0..m * l)
                    .map(|col| {
                        let (j, ll2) = (col / l, col % l);
                        if ll2 == ll {
                            scalar_rows[kk][j]
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let lifted = VectorCode::new(Matrix::from_rows(q, m * l, lifted_rows).unwrap(), l).unwrap();
        let r: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.6)).collect();
        if r.is_empty() {
            continue;
        }
        assert_eq!(
            vector_decodable_set(&lifted, &r).unwrap(),
            decodable_set(&scalar, &r).unwrap()
        );
    }
}

/// The worst-case t-requests family forces any valid code to full rank m,
/// so the encoder's reduced length can never go below m there.
#[test]
fn complete_t_requests_family_needs_m_transmissions() {
    for (m, t) in [(4usize, 2usize), (5, 2), (5, 3), (6, 4), (7, 2)] {
        let inst = generate(&GenSpec::CompleteT { m, t }).unwrap();
        let res = encode_t(&inst).unwrap();
        assert!(
            res.reduced_len >= m,
            "reduced {} below m = {} at t = {}",
            res.reduced_len,
            m,
            t
        );
        check_encode_invariants(&inst, &res).unwrap();
    }
}
