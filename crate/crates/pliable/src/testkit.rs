//! Brute-force reference implementations backing the test suites.
//!
//! These decide decodability at the payload level: fix a concrete message
//! vector, enumerate every message assignment consistent with the received
//! transmissions and the side information, and call a message decodable when
//! it is constant across the whole solution set. They deliberately share no
//! code with the rank-based production paths they are checked against.

use crate::decode::VectorCode;
use crate::gf::Matrix;
use rand::Rng;

pub fn random_matrix(rng: &mut impl Rng, q: u32, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..q)).collect())
        .collect();
    Matrix::from_rows(q, cols, data).unwrap()
}

pub fn mat_vec(a: &Matrix, v: &[u32]) -> Vec<u32> {
    assert_eq!(a.cols(), v.len());
    let f = a.field();
    (0..a.rows())
        .map(|i| {
            (0..a.cols()).fold(0u32, |acc, j| f.add(acc, f.mul(a.get(i, j), v[j])))
        })
        .collect()
}

fn for_each_vector(q: u32, len: usize, mut f: impl FnMut(&[u32])) {
    let mut v = vec![0u32; len];
    loop {
        f(&v);
        let mut pos = 0;
        loop {
            if pos == len {
                return;
            }
            v[pos] += 1;
            if v[pos] < q {
                break;
            }
            v[pos] = 0;
            pos += 1;
        }
    }
}

fn normalize(r: &[usize]) -> Vec<usize> {
    let mut req = r.to_vec();
    req.sort_unstable();
    req.dedup();
    req
}

/// Scalar oracle: all solutions of A_R y = x with the side information
/// removed; a coordinate that never varies is decodable.
pub fn enumeration_decodable_set(a: &Matrix, r: &[usize], b: &[u32]) -> Vec<usize> {
    let req = normalize(r);
    let f = a.field();
    let x = mat_vec(a, b);
    // subtract the known side-information contributions
    let mut syndrome = x;
    for (j, &bj) in b.iter().enumerate() {
        if !req.contains(&j) {
            for (k, s) in syndrome.iter_mut().enumerate() {
                *s = f.sub(*s, f.mul(a.get(k, j), bj));
            }
        }
    }
    let cols: Vec<Vec<u32>> = req.iter().map(|&j| a.column(j)).collect();
    let mut solutions: Vec<Vec<u32>> = Vec::new();
    for_each_vector(f.q(), req.len(), |y| {
        let mut lhs = vec![0u32; a.rows()];
        for (idx, col) in cols.iter().enumerate() {
            for (k, l) in lhs.iter_mut().enumerate() {
                *l = f.add(*l, f.mul(col[k], y[idx]));
            }
        }
        if lhs == syndrome {
            solutions.push(y.to_vec());
        }
    });
    assert!(!solutions.is_empty(), "the true message vector always solves");
    req.iter()
        .enumerate()
        .filter(|(idx, _)| {
            let first = solutions[0][*idx];
            solutions.iter().all(|s| s[*idx] == first)
        })
        .map(|(_, &j)| j)
        .collect()
}

/// Vector oracle: same enumeration over whole sub-message blocks; a message
/// is decodable when every one of its L coordinates is constant.
pub fn vector_enumeration_decodable_set(code: &VectorCode, r: &[usize], b: &[u32]) -> Vec<usize> {
    let req = normalize(r);
    let a = code.base();
    let l = code.l();
    let f = a.field();
    assert_eq!(b.len(), a.cols());
    let x = mat_vec(a, b);
    let mut syndrome = x;
    for j in 0..code.m() {
        if !req.contains(&j) {
            for sub in 0..l {
                let col = j * l + sub;
                for (k, s) in syndrome.iter_mut().enumerate() {
                    *s = f.sub(*s, f.mul(a.get(k, col), b[col]));
                }
            }
        }
    }
    let cols: Vec<Vec<u32>> = req
        .iter()
        .flat_map(|&j| (0..l).map(move |sub| j * l + sub))
        .map(|c| a.column(c))
        .collect();
    let mut solutions: Vec<Vec<u32>> = Vec::new();
    for_each_vector(f.q(), cols.len(), |y| {
        let mut lhs = vec![0u32; a.rows()];
        for (idx, col) in cols.iter().enumerate() {
            for (k, s) in lhs.iter_mut().enumerate() {
                *s = f.add(*s, f.mul(col[k], y[idx]));
            }
        }
        if lhs == syndrome {
            solutions.push(y.to_vec());
        }
    });
    assert!(!solutions.is_empty());
    req.iter()
        .enumerate()
        .filter(|(idx, _)| {
            (0..l).all(|sub| {
                let pos = idx * l + sub;
                let first = solutions[0][pos];
                solutions.iter().all(|s| s[pos] == first)
            })
        })
        .map(|(_, &j)| j)
        .collect()
}

// ---------------------------------------------------------------------------
// Encoder invariant checking
// ---------------------------------------------------------------------------

use crate::decode;
use crate::greedy::{EncodeResult, SUB_VECTORS};
use crate::instance::Instance;

fn fail(msg: String) -> std::result::Result<(), String> {
    Err(msg)
}

fn ceil_log2(x: usize) -> u32 {
    usize::BITS - (x - 1).leading_zeros()
}

fn rule_satisfied(c: &[u32; 3]) -> bool {
    decodable_types(c) != [false; 3]
}

fn decodable_types(c: &[u32; 3]) -> [bool; 3] {
    let mut out = [false; 3];
    for k in 0..3 {
        if c[k] == 1 && (0..3).filter(|&o| o != k && c[o] > 0).count() <= 1 {
            out[k] = true;
        }
    }
    out
}

/// Replays an encode run from its logs and the instance, independently
/// recomputing every recorded quantity and asserting the guarantees the
/// encoder is supposed to maintain: the peeling order and its effective
/// clients, the dyadic grouping boundaries, the greedy tie-breaking, the
/// per-step retention choice, the at-least-a-third satisfaction per group,
/// the per-step weight moved out of the satisfied set, the per-round weight
/// decay, the final decodability of the emitted code, and the hard length
/// bounds.
pub fn check_encode_invariants(
    inst: &Instance,
    res: &EncodeResult,
) -> std::result::Result<(), String> {
    let m = inst.m();
    let n = inst.n();
    let t = res.t;
    let weighted = t > 1;

    let mut edge = vec![false; n * m];
    for (i, r) in inst.requests().iter().enumerate() {
        for &j in r {
            edge[i * m + j] = true;
        }
    }
    let mut decodes = vec![0usize; n];
    let mut decoded_seq: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut expected_rows: Vec<Vec<u32>> = Vec::new();

    for (rno, round) in res.rounds.iter().enumerate() {
        let expect_active: Vec<usize> = (0..n).filter(|&i| decodes[i] < t).collect();
        if round.active != expect_active {
            return fail(format!("round {}: active set mismatch", rno));
        }
        let units: Vec<u64> = (0..n)
            .map(|i| {
                if decodes[i] < t {
                    1u64 << (t - 1 - decodes[i])
                } else {
                    0
                }
            })
            .collect();
        for (idx, &i) in round.active.iter().enumerate() {
            if round.weights[idx] != units[i] {
                return fail(format!("round {}: weight of client {} mismatch", rno, i));
            }
        }
        let total: u128 = round.active.iter().map(|&i| units[i] as u128).sum();
        if total != round.total_weight {
            return fail(format!("round {}: total weight mismatch", rno));
        }

        // replay the peeling along the logged order
        let mut seen = vec![false; m];
        if round.order.len() != m {
            return fail(format!("round {}: order is not a permutation", rno));
        }
        let mut remaining: Vec<bool> = (0..n).map(|i| decodes[i] < t).collect();
        let mut eff_w_by_msg = vec![0u128; m];
        let mut eff_c_by_msg: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (l, &j) in round.order.iter().enumerate() {
            if j >= m || seen[j] {
                return fail(format!("round {}: order is not a permutation", rno));
            }
            let weight_of = |j2: usize, remaining: &[bool]| -> u128 {
                (0..n)
                    .filter(|&i| remaining[i] && edge[i * m + j2])
                    .map(|i| units[i] as u128)
                    .sum()
            };
            let w = weight_of(j, &remaining);
            // maximality and lowest-index tie break among unplaced messages
            for (j2, &placed) in seen.iter().enumerate() {
                if placed || j2 == j {
                    continue;
                }
                let w2 = weight_of(j2, &remaining);
                if w2 > w || (w2 == w && j2 < j) {
                    return fail(format!(
                        "round {}: position {} picked message {} over {}",
                        rno, l, j, j2
                    ));
                }
            }
            seen[j] = true;
            let claimed: Vec<usize> = (0..n)
                .filter(|&i| remaining[i] && edge[i * m + j])
                .collect();
            for &i in &claimed {
                remaining[i] = false;
            }
            if round.eff_weight[l] != w || round.eff_clients[l] != claimed {
                return fail(format!(
                    "round {}: effective profile of message {} mismatch",
                    rno, j
                ));
            }
            eff_w_by_msg[j] = w;
            eff_c_by_msg[j] = claimed;
        }

        let n_active = round.active.len();
        let expect_base: u128 = if weighted {
            eff_w_by_msg[round.order[0]]
        } else {
            n_active as u128
        };
        if round.base != expect_base || (weighted && round.base == 0) {
            return fail(format!("round {}: dyadic base mismatch", rno));
        }
        let s_count = ceil_log2(n_active).max(1) as usize;
        if round.group_count != s_count {
            return fail(format!("round {}: group count mismatch", rno));
        }

        // grouping: recompute each message's slot
        let base = round.base;
        let mut slot_of: Vec<Option<usize>> = vec![None; m]; // 0 = overflow
        for &j in &round.order {
            let w = eff_w_by_msg[j];
            if w == 0 {
                if weighted {
                    slot_of[j] = Some(0);
                }
                continue;
            }
            if weighted && w << s_count <= base {
                slot_of[j] = Some(0);
                continue;
            }
            let mut s = 1usize;
            while (w << s) <= base {
                s += 1;
            }
            slot_of[j] = Some(s.min(s_count));
        }
        let mut logged_slot: Vec<Option<usize>> = vec![None; m];
        for &j in &round.overflow {
            logged_slot[j] = Some(0);
        }
        let mut last_s = 0usize;
        for g in &round.groups {
            if g.s <= last_s || g.s > s_count {
                return fail(format!("round {}: groups out of order", rno));
            }
            last_s = g.s;
            if g.messages.is_empty() {
                return fail(format!("round {}: empty group {} logged", rno, g.s));
            }
            for &j in &g.messages {
                logged_slot[j] = Some(g.s);
            }
            // messages listed in sort order
            let mut pos = g
                .messages
                .iter()
                .map(|&j| round.order.iter().position(|&o| o == j).unwrap());
            let mut prev = pos.next().unwrap();
            for p in pos {
                if p <= prev {
                    return fail(format!("round {}: group {} not in sort order", rno, g.s));
                }
                prev = p;
            }
        }
        if slot_of != logged_slot {
            return fail(format!("round {}: grouping mismatch", rno));
        }
        for g in &round.groups {
            for &j in &g.messages {
                let w = eff_w_by_msg[j];
                if g.s < s_count && (w << g.s) <= base {
                    return fail(format!(
                        "round {}: message {} too light for group {}",
                        rno, j, g.s
                    ));
                }
                if (w << (g.s - 1)) > base {
                    return fail(format!(
                        "round {}: message {} too heavy for group {}",
                        rno, j, g.s
                    ));
                }
            }
        }
        if weighted {
            for &j in &round.overflow {
                let w = eff_w_by_msg[j];
                // never encoded, and within the documented W/n ceiling
                if w * n_active as u128 > base {
                    return fail(format!("round {}: overflow message {} too heavy", rno, j));
                }
            }
        } else if !round.overflow.is_empty() {
            return fail(format!("round {}: overflow group in unweighted mode", rno));
        }

        // effective clients of distinct messages never overlap
        let mut claimed_by = vec![usize::MAX; n];
        for &j in &round.order {
            for &i in &eff_c_by_msg[j] {
                if claimed_by[i] != usize::MAX {
                    return fail(format!("round {}: client {} claimed twice", rno, i));
                }
                claimed_by[i] = j;
            }
        }

        // replay every group
        let mut round_decoded = 0usize;
        let mut covered_weight: u128 = 0;
        let mut loss: u128 = 0;
        for g in &round.groups {
            let mut clients: Vec<usize> = g
                .messages
                .iter()
                .flat_map(|&j| eff_c_by_msg[j].iter().copied())
                .collect();
            clients.sort_unstable();
            if clients != g.clients {
                return fail(format!("round {} group {}: client set mismatch", rno, g.s));
            }
            let g_weight: u128 = clients.iter().map(|&i| units[i] as u128).sum();
            if g_weight != g.weight {
                return fail(format!("round {} group {}: weight mismatch", rno, g.s));
            }
            covered_weight += g_weight;

            let slot = |i: usize| clients.binary_search(&i).ok();
            let mut counts = vec![[0u32; 3]; clients.len()];
            let mut visited = vec![false; clients.len()];
            let mut banned = vec![false; clients.len()];
            let mut sat = vec![false; clients.len()];
            if g.steps.len() != g.messages.len() {
                return fail(format!("round {} group {}: step count mismatch", rno, g.s));
            }
            for (mi, (&j, step)) in g.messages.iter().zip(&g.steps).enumerate() {
                if step.message != j {
                    return fail(format!("round {} group {}: step order mismatch", rno, g.s));
                }
                let neigh: Vec<usize> = clients
                    .iter()
                    .enumerate()
                    .filter(|&(_, &i)| edge[i * m + j])
                    .map(|(sl, _)| sl)
                    .collect();
                let ns_w: u128 = neigh.iter().map(|&sl| units[clients[sl]] as u128).sum();
                if ns_w != g.ns_neighbor_weight[mi] {
                    return fail(format!(
                        "round {} group {}: in-group neighbor weight of message {} mismatch",
                        rno, g.s, j
                    ));
                }
                // the grouping property: weight of j's neighbors inside the
                // group's client set is at most base / 2^(s-1)
                if ns_w << (g.s - 1) > base {
                    return fail(format!(
                        "round {} group {}: grouping property violated at message {}",
                        rno, g.s, j
                    ));
                }
                let mut retained = [0u128; 3];
                for cand in 0..3 {
                    for &sl in &neigh {
                        if visited[sl] && sat[sl] {
                            let mut c = counts[sl];
                            c[cand] += 1;
                            if rule_satisfied(&c) {
                                retained[cand] += units[clients[sl]] as u128;
                            }
                        }
                    }
                }
                if retained != step.retained {
                    return fail(format!(
                        "round {} group {}: retained weights mismatch at message {}",
                        rno, g.s, j
                    ));
                }
                let best = (0..3).max_by_key(|&c| retained[c]).unwrap();
                let first_best = (0..3).find(|&c| retained[c] == retained[best]).unwrap();
                if step.chosen != first_best {
                    return fail(format!(
                        "round {} group {}: greedy choice at message {} is not the \
                         first maximizer",
                        rno, g.s, j
                    ));
                }
                let mut moved = 0u128;
                let mut newly = Vec::new();
                for &sl in &neigh {
                    if !visited[sl] {
                        visited[sl] = true;
                        counts[sl][step.chosen] += 1;
                        sat[sl] = true;
                        newly.push(clients[sl]);
                    } else {
                        counts[sl][step.chosen] += 1;
                        let now = rule_satisfied(&counts[sl]);
                        if sat[sl] && !now {
                            moved += units[clients[sl]] as u128;
                            if res.relaxed_unsat {
                                banned[sl] = true;
                            }
                        }
                        sat[sl] = now && !banned[sl];
                    }
                }
                if moved != step.moved_out || newly != step.newly_visited {
                    return fail(format!(
                        "round {} group {}: step effects mismatch at message {}",
                        rno, g.s, j
                    ));
                }
                // weight moved out in one step stays under (base/2^(s-1)) / 3
                if (moved * 3) << (g.s - 1) >= base && moved > 0 {
                    return fail(format!(
                        "round {} group {}: step at message {} moved too much weight out",
                        rno, g.s, j
                    ));
                }
                // the new effective clients are exactly the first-visited ones
                if newly != eff_c_by_msg[j] {
                    return fail(format!(
                        "round {} group {}: first visits differ from effective clients of {}",
                        rno, g.s, j
                    ));
                }
            }
            let sat_end: Vec<usize> = clients
                .iter()
                .enumerate()
                .filter(|&(sl, _)| sat[sl])
                .map(|(_, &i)| i)
                .collect();
            if sat_end != g.sat_end {
                return fail(format!("round {} group {}: final SAT mismatch", rno, g.s));
            }
            // at least a third of the group's clients (by weight) decode
            let sat_w: u128 = sat_end.iter().map(|&i| units[i] as u128).sum();
            if 3 * sat_w < g_weight {
                return fail(format!(
                    "round {} group {}: fewer than a third satisfied",
                    rno, g.s
                ));
            }
            // decoded messages: the lowest-index decodable incident message
            let chosen_of: Vec<usize> = g.steps.iter().map(|s| s.chosen).collect();
            let mut expect_decoded = Vec::new();
            for &i in &sat_end {
                let sl = slot(i).unwrap();
                let types = decodable_types(&counts[sl]);
                let msg = g
                    .messages
                    .iter()
                    .enumerate()
                    .filter(|&(mi, &j)| edge[i * m + j] && types[chosen_of[mi]])
                    .map(|(_, &j)| j)
                    .min();
                match msg {
                    Some(j) => expect_decoded.push((i, j)),
                    None => {
                        return fail(format!(
                            "round {} group {}: satisfied client {} has no decodable message",
                            rno, g.s, i
                        ))
                    }
                }
            }
            if expect_decoded != g.decoded {
                return fail(format!("round {} group {}: decode list mismatch", rno, g.s));
            }
            for &(i, j) in &g.decoded {
                if !inst.request(i).contains(&j) {
                    return fail(format!("client {} decoded unrequested message {}", i, j));
                }
                let before = units[i] as u128;
                decodes[i] += 1;
                decoded_seq[i].push(j);
                edge[i * m + j] = false;
                let after = if decodes[i] < t {
                    1u128 << (t - 1 - decodes[i])
                } else {
                    0
                };
                loss += before - after;
                round_decoded += 1;
            }
            // the emitted pair of rows
            let mut row_a = vec![0u32; m];
            let mut row_b = vec![0u32; m];
            for (mi, &j) in g.messages.iter().enumerate() {
                row_a[j] = SUB_VECTORS[chosen_of[mi]][0];
                row_b[j] = SUB_VECTORS[chosen_of[mi]][1];
            }
            expected_rows.push(row_a);
            expected_rows.push(row_b);
        }
        if round_decoded == 0 {
            return fail(format!("round {} satisfied no client", rno));
        }
        // the dyadic groups carry at least half the active weight
        if 2 * covered_weight < total {
            return fail(format!("round {}: groups cover under half the weight", rno));
        }
        // total weight decays by at least a twelfth per round
        if 12 * (total - loss) > 11 * total {
            return fail(format!("round {}: weight decayed too slowly", rno));
        }
    }

    if let Some(i) = (0..n).find(|&i| decodes[i] != t) {
        return fail(format!("client {} finished with {} decodes", i, decodes[i]));
    }
    if res.decoded != decoded_seq {
        return fail("decode history mismatch".into());
    }

    // emitted matrices
    if res.raw_len != res.code.rows() || res.code.cols() != m || res.code.q() != 2 {
        return fail("raw code shape mismatch".into());
    }
    if expected_rows.len() != res.code.rows() {
        return fail("logged groups disagree with emitted row count".into());
    }
    for (i, row) in expected_rows.iter().enumerate() {
        if *row != res.code.row_vec(i) {
            return fail(format!("code row {} disagrees with the logs", i));
        }
    }
    if res.reduced != res.code.row_basis() || res.reduced_len != res.code.rank() {
        return fail("reduced code is not the row basis of the raw code".into());
    }
    if res.reduced_len > res.raw_len {
        return fail("reduced length exceeds raw length".into());
    }

    // every client can decode what the encoder promised, under both codes
    for a in [&res.code, &res.reduced] {
        let report = decode::verify(a, inst).map_err(|e| e.to_string())?;
        if !report.all_satisfied() {
            return fail("emitted code fails verification".into());
        }
        for (i, d) in report.decodable.iter().enumerate() {
            for j in &decoded_seq[i] {
                if !d.contains(j) {
                    return fail(format!(
                        "client {} cannot statically decode promised message {}",
                        i, j
                    ));
                }
            }
        }
    }

    // hard length bounds
    if n >= 2 {
        let log2n = (n as f64).log2();
        if t == 1 {
            let bound = 2.0 / 1.5f64.log2() * log2n * log2n;
            if res.raw_len as f64 > bound + 1e-9 {
                return fail(format!("raw length {} exceeds bound {:.3}", res.raw_len, bound));
            }
            let round_bound = (log2n / 1.5f64.log2()).ceil() as usize;
            if res.rounds.len() > round_bound {
                return fail(format!(
                    "{} rounds exceed the bound {}",
                    res.rounds.len(),
                    round_bound
                ));
            }
        } else {
            let bound = 2.0
                * log2n.ceil()
                * ((t as f64 + log2n) / (12f64 / 11.0).log2()).ceil();
            if res.raw_len as f64 > bound + 1e-9 {
                return fail(format!("raw length {} exceeds bound {:.3}", res.raw_len, bound));
            }
        }
    }
    Ok(())
}
