//! The round-based greedy encoder.
//!
//! Each round sorts the still-active part of the bipartite graph by a peeling
//! procedure (largest remaining neighborhood first), buckets the messages into
//! dyadic groups, and emits two binary rows per nonempty group. Within a
//! group, messages receive 2-entry sub-vectors from {(1,0),(0,1),(1,1)}
//! greedily so that as many already-satisfiable clients as possible stay
//! satisfiable; a client's state under the partial 2-row block follows the
//! column-span criterion, which for these three sub-vector types collapses to
//! a count rule over the types she sees.
//!
//! The same engine drives the t-requests variant in [`crate::greedy_t`]: there
//! clients carry dyadic weights 2^-d (d = messages decoded so far), the sort
//! and the greedy maximize weight instead of cardinality, and the dyadic
//! grouping is based on the heaviest message with a never-encoded overflow
//! group for the tail. Weights are held as exact integer units scaled by
//! 2^(t-1), never as floats.

use crate::error::{Error, Result};
use crate::gf::Matrix;
use crate::instance::Instance;

/// The three candidate coding sub-vectors, in tie-break order.
pub const SUB_VECTORS: [[u32; 2]; 3] = [[1, 0], [0, 1], [1, 1]];

/// Largest t the weighted encoder accepts; unit weights are 2^(t-1-d) and
/// must stay inside u64.
pub const MAX_T: usize = 64;

pub(crate) fn ceil_log2(x: usize) -> u32 {
    debug_assert!(x > 0);
    usize::BITS - (x - 1).leading_zeros()
}

/// Peeling order of the active messages with effective degrees and effective
/// clients (the neighbors not already claimed by an earlier message).
#[derive(Debug, Clone)]
pub struct SortResult {
    /// Message ids, effective degree non-increasing.
    pub order: Vec<usize>,
    /// d† per message id.
    pub eff_degree: Vec<usize>,
    /// N† per message id, sorted; pairwise disjoint.
    pub eff_clients: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct StepLog {
    pub message: usize,
    /// Weight of currently satisfied connected clients that each candidate
    /// sub-vector would keep satisfied.
    pub retained: [u128; 3],
    /// Index into [`SUB_VECTORS`].
    pub chosen: usize,
    /// Weight moved out of the satisfied set by this assignment.
    pub moved_out: u128,
    pub newly_visited: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GroupLog {
    /// Dyadic group index s, 1-based.
    pub s: usize,
    /// Messages in processing order.
    pub messages: Vec<usize>,
    /// Per message: total weight of its neighbors inside this group's client
    /// set (the grouping-property bound is checked against these).
    pub ns_neighbor_weight: Vec<u128>,
    /// N_s, sorted.
    pub clients: Vec<usize>,
    /// Total weight of N_s.
    pub weight: u128,
    pub steps: Vec<StepLog>,
    /// Clients satisfiable under the finished 2-row block.
    pub sat_end: Vec<usize>,
    /// (client, message) pairs recorded as decoded in this group.
    pub decoded: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct RoundLog {
    /// Active clients at round start, sorted.
    pub active: Vec<usize>,
    /// Weight units per active client, aligned with `active`.
    pub weights: Vec<u64>,
    /// W_T: total active weight at round start.
    pub total_weight: u128,
    pub order: Vec<usize>,
    /// Effective weight per message, aligned with `order`.
    pub eff_weight: Vec<u128>,
    /// Effective clients per message, aligned with `order`.
    pub eff_clients: Vec<Vec<usize>>,
    /// Dyadic base: the active client count, or W for the weighted variant.
    pub base: u128,
    pub group_count: usize,
    /// Messages parked in the small-weight overflow group, never encoded.
    pub overflow: Vec<usize>,
    pub groups: Vec<GroupLog>,
}

#[derive(Debug, Clone)]
pub struct EncodeResult {
    pub code: Matrix,
    pub reduced: Matrix,
    pub raw_len: usize,
    pub reduced_len: usize,
    pub rounds: Vec<RoundLog>,
    /// Messages decoded per client, in decode order.
    pub decoded: Vec<Vec<usize>>,
    pub t: usize,
    /// Weight units are multiples of 2^-(scale); 0 for the unweighted case.
    pub weight_scale_log2: u32,
    pub relaxed_unsat: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum GroupingBase {
    /// Group by effective degree against the active client count.
    ActiveCount,
    /// Group by effective weight against the heaviest message, with an
    /// overflow group below base/2^S.
    MaxMessageWeight,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct EngineOptions {
    pub t: usize,
    pub base: GroupingBase,
    pub relaxed_unsat: bool,
}

/// One round of full transmissions per active client: every client decodes
/// one new message per round she is satisfied in, until all hold t.
pub(crate) fn run_engine(inst: &Instance, opts: EngineOptions) -> Result<EncodeResult> {
    inst.require_valid()?;
    if opts.t == 0 || opts.t > MAX_T {
        return Err(Error::InvalidParameter(format!(
            "t must be between 1 and {}",
            MAX_T
        )));
    }
    debug_assert!(opts.base == GroupingBase::MaxMessageWeight || opts.t == 1);

    let m = inst.m();
    let n = inst.n();
    let scale = (opts.t - 1) as u32;

    // residual edges; decoding removes one edge, retiring removes the client
    let mut edge = vec![false; n * m];
    for (i, r) in inst.requests().iter().enumerate() {
        for &j in r {
            edge[i * m + j] = true;
        }
    }
    let mut active = vec![true; n];
    let mut active_count = n;
    let mut decode_count = vec![0usize; n];
    let mut decoded: Vec<Vec<usize>> = vec![Vec::new(); n];

    let mut code_rows: Vec<Vec<u32>> = Vec::new();
    let mut rounds: Vec<RoundLog> = Vec::new();

    while active_count > 0 {
        let unit = |d: usize| -> u64 { 1u64 << (scale as usize).saturating_sub(d) };
        let active_ids: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let units: Vec<u64> = (0..n)
            .map(|i| if active[i] { unit(decode_count[i]) } else { 0 })
            .collect();
        let total_weight: u128 = active_ids.iter().map(|&i| units[i] as u128).sum();

        // sorting: peel by maximum remaining neighbor weight, ties to the
        // lowest message index
        let (order, eff_weight_by_msg, eff_clients_by_msg) =
            peel(m, n, &edge, &active, &units);

        let base: u128 = match opts.base {
            GroupingBase::ActiveCount => active_count as u128,
            GroupingBase::MaxMessageWeight => {
                let w = eff_weight_by_msg[order[0]];
                if w == 0 {
                    return Err(Error::InvalidInstance(
                        "active clients remain but no active edges exist".into(),
                    ));
                }
                w
            }
        };
        let group_count = ceil_log2(active_count).max(1) as usize;
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); group_count];
        let mut overflow: Vec<usize> = Vec::new();
        for &j in &order {
            let w = eff_weight_by_msg[j];
            if w == 0 {
                if opts.base == GroupingBase::MaxMessageWeight {
                    overflow.push(j);
                }
                continue;
            }
            if opts.base == GroupingBase::MaxMessageWeight && w << group_count <= base {
                overflow.push(j);
                continue;
            }
            let mut s = 1usize;
            while (w << s) <= base {
                s += 1;
            }
            groups[s.min(group_count) - 1].push(j);
        }

        let mut round_log = RoundLog {
            active: active_ids.clone(),
            weights: active_ids.iter().map(|&i| units[i]).collect(),
            total_weight,
            order: order.clone(),
            eff_weight: order.iter().map(|&j| eff_weight_by_msg[j]).collect(),
            eff_clients: order.iter().map(|&j| eff_clients_by_msg[j].clone()).collect(),
            base,
            group_count,
            overflow,
            groups: Vec::new(),
        };

        let mut round_decodes = 0usize;
        for (s0, msgs) in groups.iter().enumerate() {
            if msgs.is_empty() {
                continue;
            }
            let s = s0 + 1;
            let group_log = run_group(
                s,
                msgs,
                &eff_clients_by_msg,
                &edge,
                &units,
                m,
                opts.relaxed_unsat,
                &mut code_rows,
            );

            for &(i, j) in &group_log.decoded {
                decode_count[i] += 1;
                decoded[i].push(j);
                edge[i * m + j] = false;
                if decode_count[i] == opts.t {
                    active[i] = false;
                    active_count -= 1;
                }
                round_decodes += 1;
            }
            round_log.groups.push(group_log);
        }

        if round_decodes == 0 {
            return Err(Error::InternalInvariant(
                "a full round satisfied no client".into(),
            ));
        }
        rounds.push(round_log);
    }

    let code = Matrix::from_rows(2, m, code_rows)?;
    let reduced = code.row_basis();
    let raw_len = code.rows();
    let reduced_len = reduced.rows();
    Ok(EncodeResult {
        code,
        reduced,
        raw_len,
        reduced_len,
        rounds,
        decoded,
        t: opts.t,
        weight_scale_log2: scale,
        relaxed_unsat: opts.relaxed_unsat,
    })
}

/// Max-weight peeling: repeatedly take the message with the heaviest
/// remaining neighborhood and claim those neighbors as its effective clients.
fn peel(
    m: usize,
    n: usize,
    edge: &[bool],
    active: &[bool],
    units: &[u64],
) -> (Vec<usize>, Vec<u128>, Vec<Vec<usize>>) {
    let mut remaining: Vec<bool> = active.to_vec();
    let mut rem_weight: Vec<u128> = vec![0; m];
    for i in 0..n {
        if remaining[i] {
            for j in 0..m {
                if edge[i * m + j] {
                    rem_weight[j] += units[i] as u128;
                }
            }
        }
    }
    let mut placed = vec![false; m];
    let mut order = Vec::with_capacity(m);
    let mut eff_weight = vec![0u128; m];
    let mut eff_clients: Vec<Vec<usize>> = vec![Vec::new(); m];
    for _ in 0..m {
        let mut best = usize::MAX;
        for j in 0..m {
            if !placed[j] && (best == usize::MAX || rem_weight[j] > rem_weight[best]) {
                best = j;
            }
        }
        placed[best] = true;
        order.push(best);
        eff_weight[best] = rem_weight[best];
        let claimed: Vec<usize> = (0..n)
            .filter(|&i| remaining[i] && edge[i * m + best])
            .collect();
        for &i in &claimed {
            remaining[i] = false;
            for j in 0..m {
                if edge[i * m + j] && !placed[j] {
                    rem_weight[j] -= units[i] as u128;
                }
            }
        }
        eff_clients[best] = claimed;
    }
    (order, eff_weight, eff_clients)
}

/// Satisfiability under a 2-row block: among the sub-vectors on the client's
/// visited incident messages, some vector must sit outside the span of the
/// rest. With types x=(1,0), y=(0,1), z=(1,1) that means: some type occurs
/// exactly once and at most one other type is present.
fn rule_satisfied(c: &[u32; 3]) -> bool {
    decodable_types(c) != [false; 3]
}

fn decodable_types(c: &[u32; 3]) -> [bool; 3] {
    let mut out = [false; 3];
    for k in 0..3 {
        if c[k] == 1 {
            let others = (0..3).filter(|&o| o != k && c[o] > 0).count();
            out[k] = others <= 1;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn run_group(
    s: usize,
    msgs: &[usize],
    eff_clients_by_msg: &[Vec<usize>],
    edge: &[bool],
    units: &[u64],
    m: usize,
    relaxed_unsat: bool,
    code_rows: &mut Vec<Vec<u32>>,
) -> GroupLog {
    let mut clients: Vec<usize> = msgs
        .iter()
        .flat_map(|&j| eff_clients_by_msg[j].iter().copied())
        .collect();
    clients.sort_unstable();

    let mut in_group = std::collections::HashMap::new();
    for (slot, &i) in clients.iter().enumerate() {
        in_group.insert(i, slot);
    }
    let k = clients.len();
    let mut counts = vec![[0u32; 3]; k];
    let mut visited = vec![false; k];
    let mut banned = vec![false; k];
    let mut sat = vec![false; k];

    let neighbors_in_group = |j: usize| -> Vec<usize> {
        clients
            .iter()
            .enumerate()
            .filter(|&(_, &i)| edge[i * m + j])
            .map(|(slot, _)| slot)
            .collect()
    };

    let ns_neighbor_weight: Vec<u128> = msgs
        .iter()
        .map(|&j| {
            neighbors_in_group(j)
                .iter()
                .map(|&slot| units[clients[slot]] as u128)
                .sum()
        })
        .collect();

    let mut steps = Vec::with_capacity(msgs.len());
    let mut chosen_of: Vec<usize> = vec![0; msgs.len()];
    for (mi, &j) in msgs.iter().enumerate() {
        let neigh = neighbors_in_group(j);
        let mut retained = [0u128; 3];
        for cand in 0..3 {
            for &slot in &neigh {
                if visited[slot] && sat[slot] {
                    let mut c = counts[slot];
                    c[cand] += 1;
                    if rule_satisfied(&c) {
                        retained[cand] += units[clients[slot]] as u128;
                    }
                }
            }
        }
        let mut chosen = 0;
        for cand in 1..3 {
            if retained[cand] > retained[chosen] {
                chosen = cand;
            }
        }
        chosen_of[mi] = chosen;

        let mut moved_out = 0u128;
        let mut newly_visited = Vec::new();
        for &slot in &neigh {
            if !visited[slot] {
                visited[slot] = true;
                counts[slot][chosen] += 1;
                sat[slot] = true;
                debug_assert!(rule_satisfied(&counts[slot]));
                newly_visited.push(clients[slot]);
            } else {
                counts[slot][chosen] += 1;
                let now = rule_satisfied(&counts[slot]);
                if sat[slot] && !now {
                    moved_out += units[clients[slot]] as u128;
                    if relaxed_unsat {
                        banned[slot] = true;
                    }
                }
                sat[slot] = now && !banned[slot];
            }
        }
        steps.push(StepLog {
            message: j,
            retained,
            chosen,
            moved_out,
            newly_visited,
        });
    }

    // every effective client of the group's messages has been visited by now
    debug_assert!(visited.iter().all(|&v| v));

    let mut sat_end = Vec::new();
    let mut decoded = Vec::new();
    for (slot, &i) in clients.iter().enumerate() {
        if !sat[slot] {
            continue;
        }
        sat_end.push(i);
        let types = decodable_types(&counts[slot]);
        let msg = msgs
            .iter()
            .enumerate()
            .filter(|&(mi, &j)| edge[i * m + j] && types[chosen_of[mi]])
            .map(|(_, &j)| j)
            .min()
            .expect("a satisfiable client has a decodable incident message");
        decoded.push((i, msg));
    }
    decoded.sort_unstable();

    let mut row_a = vec![0u32; m];
    let mut row_b = vec![0u32; m];
    for (mi, &j) in msgs.iter().enumerate() {
        row_a[j] = SUB_VECTORS[chosen_of[mi]][0];
        row_b[j] = SUB_VECTORS[chosen_of[mi]][1];
    }
    code_rows.push(row_a);
    code_rows.push(row_b);

    let weight = clients.iter().map(|&i| units[i] as u128).sum();
    GroupLog {
        s,
        messages: msgs.to_vec(),
        ns_neighbor_weight,
        clients,
        weight,
        steps,
        sat_end,
        decoded,
    }
}

/// Sorts the messages of the subgraph induced by `active` clients by the
/// peeling procedure: repeatedly pick the message with the most remaining
/// neighbors (ties to the lowest index) and claim those neighbors.
pub fn sort_messages(inst: &Instance, active: &[usize]) -> Result<SortResult> {
    inst.require_valid()?;
    let m = inst.m();
    let n = inst.n();
    let mut active_mask = vec![false; n];
    for &i in active {
        if i >= n {
            return Err(Error::InvalidParameter(format!(
                "active client {} out of range",
                i
            )));
        }
        active_mask[i] = true;
    }
    let mut edge = vec![false; n * m];
    for (i, r) in inst.requests().iter().enumerate() {
        for &j in r {
            edge[i * m + j] = true;
        }
    }
    let units = vec![1u64; n];
    let (order, eff_weight, eff_clients) = peel(m, n, &edge, &active_mask, &units);
    Ok(SortResult {
        order,
        eff_degree: eff_weight.iter().map(|&w| w as usize).collect(),
        eff_clients,
    })
}

/// Effective degrees and effective clients for an arbitrary message order:
/// message j's effective clients are its active neighbors not adjacent to any
/// earlier message in the order.
pub fn effective_profile(
    inst: &Instance,
    active: &[usize],
    order: &[usize],
) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    inst.require_valid()?;
    let n = inst.n();
    let mut remaining = vec![false; n];
    for &i in active {
        if i >= n {
            return Err(Error::InvalidParameter(format!(
                "active client {} out of range",
                i
            )));
        }
        remaining[i] = true;
    }
    let mut eff_degree = vec![0usize; inst.m()];
    let mut eff_clients = vec![Vec::new(); inst.m()];
    for &j in order {
        if j >= inst.m() {
            return Err(Error::InvalidParameter(format!(
                "message {} out of range",
                j
            )));
        }
        let claimed: Vec<usize> = (0..n)
            .filter(|&i| remaining[i] && inst.request(i).contains(&j))
            .collect();
        for &i in &claimed {
            remaining[i] = false;
        }
        eff_degree[j] = claimed.len();
        eff_clients[j] = claimed;
    }
    Ok((eff_degree, eff_clients))
}

/// Runs the greedy encoder on a single-request instance (t = 1).
pub fn encode(inst: &Instance) -> Result<EncodeResult> {
    encode_with_options(inst, false)
}

/// `relaxed_unsat` switches to the variant where a client that once leaves
/// the satisfied set during a group stays out for the rest of that group.
pub fn encode_with_options(inst: &Instance, relaxed_unsat: bool) -> Result<EncodeResult> {
    if inst.t() != 1 {
        return Err(Error::InvalidParameter(
            "the single-request encoder needs t = 1; use the t-requests variant".into(),
        ));
    }
    run_engine(
        inst,
        EngineOptions {
            t: 1,
            base: GroupingBase::ActiveCount,
            relaxed_unsat,
        },
    )
}

/// Structured JSON rendering of an encode run (1-based indices).
pub fn round_log_json(res: &EncodeResult, algorithm: &str) -> serde_json::Value {
    use serde_json::json;
    let w = |x: u128| -> serde_json::Value {
        match u64::try_from(x) {
            Ok(v) => json!(v),
            Err(_) => json!(x.to_string()),
        }
    };
    let rounds: Vec<_> = res
        .rounds
        .iter()
        .map(|r| {
            json!({
                "active": r.active.iter().map(|&i| i + 1).collect::<Vec<_>>(),
                "weights": r.weights,
                "total_weight": w(r.total_weight),
                "order": r.order.iter().map(|&j| j + 1).collect::<Vec<_>>(),
                "effective_weight": r.eff_weight.iter().map(|&x| w(x)).collect::<Vec<_>>(),
                "effective_clients": r.eff_clients.iter()
                    .map(|c| c.iter().map(|&i| i + 1).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "base": w(r.base),
                "group_count": r.group_count,
                "overflow": r.overflow.iter().map(|&j| j + 1).collect::<Vec<_>>(),
                "groups": r.groups.iter().map(|g| json!({
                    "s": g.s,
                    "messages": g.messages.iter().map(|&j| j + 1).collect::<Vec<_>>(),
                    "ns_neighbor_weight": g.ns_neighbor_weight.iter().map(|&x| w(x)).collect::<Vec<_>>(),
                    "clients": g.clients.iter().map(|&i| i + 1).collect::<Vec<_>>(),
                    "weight": w(g.weight),
                    "steps": g.steps.iter().map(|st| json!({
                        "message": st.message + 1,
                        "sub_vector": SUB_VECTORS[st.chosen],
                        "retained": st.retained.iter().map(|&x| w(x)).collect::<Vec<_>>(),
                        "moved_to_unsat_weight": w(st.moved_out),
                        "newly_visited": st.newly_visited.iter().map(|&i| i + 1).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                    "sat_end": g.sat_end.iter().map(|&i| i + 1).collect::<Vec<_>>(),
                    "decoded": g.decoded.iter().map(|&(i, j)| json!([i + 1, j + 1])).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "algorithm": algorithm,
        "t": res.t,
        "relaxed_unsat": res.relaxed_unsat,
        "raw_len": res.raw_len,
        "reduced_len": res.reduced_len,
        "weight_scale_log2": res.weight_scale_log2,
        "decoded": res.decoded.iter()
            .map(|d| d.iter().map(|&j| j + 1).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "rounds": rounds,
    })
}
