//! Problem instances: m messages, n clients, per-client request sets, and the
//! generators for the instance families used across the crate.
//!
//! Message and client indices are 0-based in memory; the JSON wire format is
//! 1-based with clients listed in order.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A pliable index coding instance `(m, n, {R_i}, t)`.
///
/// `requests[i]` is client i's request set R_i (sorted, 0-based). The side
/// information S_i is the complement and is never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct Instance {
    m: usize,
    t: usize,
    requests: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance without semantic validation; run [`Instance::validate`]
    /// to surface empty or undersized request sets and out-of-range indices.
    /// Duplicate indices inside one request set are rejected outright since
    /// they have no set interpretation.
    pub fn new(m: usize, t: usize, requests: Vec<Vec<usize>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if requests.is_empty() {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if t == 0 {
            return Err(Error::InvalidParameter("t must be at least 1".into()));
        }
        let mut normalized = Vec::with_capacity(requests.len());
        for (i, mut r) in requests.into_iter().enumerate() {
            r.sort_unstable();
            if r.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "client {} lists a message twice",
                    i
                )));
            }
            normalized.push(r);
        }
        Ok(Self {
            m,
            t,
            requests: normalized,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.requests.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn requests(&self) -> &[Vec<usize>] {
        &self.requests
    }

    pub fn request(&self, client: usize) -> &[usize] {
        &self.requests[client]
    }

    /// Structural problems, errors first. An empty list means the instance is
    /// well formed; duplicate request sets are only warnings because random
    /// generation is allowed to produce them.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, r) in self.requests.iter().enumerate() {
            if r.is_empty() {
                out.push(Violation::EmptyRequestSet { client: i });
            } else if r.len() < self.t {
                out.push(Violation::TooFewRequests {
                    client: i,
                    len: r.len(),
                    t: self.t,
                });
            }
            for &j in r {
                if j >= self.m {
                    out.push(Violation::IndexOutOfRange { client: i, index: j });
                }
            }
        }
        for a in 0..self.requests.len() {
            for b in a + 1..self.requests.len() {
                if self.requests[a] == self.requests[b] {
                    out.push(Violation::DuplicateRequestSets { first: a, second: b });
                }
            }
        }
        out.sort_by_key(|v| (v.severity() as u8, v.client_key()));
        out
    }

    pub fn validation_errors(&self) -> Vec<Violation> {
        self.validate()
            .into_iter()
            .filter(|v| v.severity() == Severity::Error)
            .collect()
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            return Ok(());
        }
        let text = errors
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::InvalidInstance(text))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyRequestSet { client: usize },
    TooFewRequests { client: usize, len: usize, t: usize },
    IndexOutOfRange { client: usize, index: usize },
    DuplicateRequestSets { first: usize, second: usize },
}

impl Violation {
    pub fn severity(&self) -> Severity {
        match self {
            Violation::DuplicateRequestSets { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }

    fn client_key(&self) -> usize {
        match self {
            Violation::EmptyRequestSet { client }
            | Violation::TooFewRequests { client, .. }
            | Violation::IndexOutOfRange { client, .. }
            | Violation::DuplicateRequestSets { first: client, .. } => *client,
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EmptyRequestSet { client } => {
                write!(f, "client {} has an empty request set", client + 1)
            }
            Violation::TooFewRequests { client, len, t } => write!(
                f,
                "client {} requests {} messages, fewer than t = {}",
                client + 1,
                len,
                t
            ),
            Violation::IndexOutOfRange { client, index } => write!(
                f,
                "client {} requests message {} outside 1..={{m}}",
                client + 1,
                index + 1
            ),
            Violation::DuplicateRequestSets { first, second } => write!(
                f,
                "clients {} and {} share the same request set",
                first + 1,
                second + 1
            ),
        }
    }
}

/// Parameters for the instance generators.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    /// Every nonempty subset of `[m]` appears once as a request set
    /// (ordered by size, then lexicographically); n = 2^m - 1.
    Complete { m: usize },
    /// The t-requests worst case: m1 = m - t + 1 subset-enumerated messages
    /// plus t - 1 messages requested by everyone; n = 2^m1 - 1.
    CompleteT { m: usize, t: usize },
    /// B(m, n, p): each client-message edge drawn independently with
    /// probability p; clients with fewer than t requests are resampled.
    Random {
        m: usize,
        n: usize,
        p: f64,
        t: usize,
        seed: u64,
    },
    /// Equal client blocks (remainder to the last block), block k using edge
    /// probability `group_probs[k]`.
    Heterogeneous {
        m: usize,
        n: usize,
        group_probs: Vec<f64>,
        t: usize,
        seed: u64,
    },
}

/// Complete instances are capped here so n = 2^m - 1 stays desk scale.
const MAX_COMPLETE_M: usize = 20;

/// Gives up on a client whose request set cannot plausibly reach size t.
const MAX_RESAMPLES: u32 = 1_000_000;

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    match spec {
        GenSpec::Complete { m } => generate_complete(*m),
        GenSpec::CompleteT { m, t } => generate_complete_t(*m, *t),
        GenSpec::Random { m, n, p, t, seed } => {
            let probs = vec![*p; *n];
            generate_random(*m, *n, &probs, *t, *seed)
        }
        GenSpec::Heterogeneous {
            m,
            n,
            group_probs,
            t,
            seed,
        } => {
            if group_probs.is_empty() {
                return Err(Error::InvalidParameter(
                    "heterogeneous generation needs at least one group probability".into(),
                ));
            }
            if group_probs.len() > *n {
                return Err(Error::InvalidParameter(
                    "more probability groups than clients".into(),
                ));
            }
            let block = n / group_probs.len();
            let mut probs = Vec::with_capacity(*n);
            for (k, &p) in group_probs.iter().enumerate() {
                let size = if k + 1 == group_probs.len() {
                    n - block * k
                } else {
                    block
                };
                probs.extend(std::iter::repeat_n(p, size));
            }
            generate_random(*m, *n, &probs, *t, *seed)
        }
    }
}

/// All nonempty subsets of 0..m ordered by cardinality, then lexicographically
/// as sorted index sequences.
fn subsets_in_canonical_order(m: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = (1u64..1 << m)
        .map(|mask| (0..m).filter(|j| mask >> j & 1 == 1).collect())
        .collect();
    subsets.sort();
    subsets.sort_by_key(|s| s.len());
    subsets
}

fn generate_complete(m: usize) -> Result<Instance> {
    if m == 0 || m > MAX_COMPLETE_M {
        return Err(Error::InvalidParameter(format!(
            "complete instances need 1 <= m <= {}",
            MAX_COMPLETE_M
        )));
    }
    Instance::new(m, 1, subsets_in_canonical_order(m))
}

fn generate_complete_t(m: usize, t: usize) -> Result<Instance> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    if m < t {
        return Err(Error::InvalidParameter(format!(
            "complete t-requests instances need m >= t, got m = {} and t = {}",
            m, t
        )));
    }
    let m1 = m - t + 1;
    if m1 > MAX_COMPLETE_M {
        return Err(Error::InvalidParameter(format!(
            "complete t-requests instances need m - t + 1 <= {}",
            MAX_COMPLETE_M
        )));
    }
    let shared: Vec<usize> = (m1..m).collect();
    let requests = subsets_in_canonical_order(m1)
        .into_iter()
        .map(|mut s| {
            s.extend(shared.iter().copied());
            s
        })
        .collect();
    Instance::new(m, t, requests)
}

/// One ChaCha8 sub-stream per client: the stream id is the client index, so
/// client i's request set does not depend on how many draws other clients
/// consumed. Resampling a too-small request set keeps drawing from the same
/// stream.
fn generate_random(m: usize, n: usize, probs: &[f64], t: usize, seed: u64) -> Result<Instance> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("m and n must be at least 1".into()));
    }
    if t == 0 || t > m {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= t <= m, got t = {} and m = {}",
            t, m
        )));
    }
    for &p in probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "edge probability {} outside [0, 1]",
                p
            )));
        }
        if p == 0.0 {
            return Err(Error::InvalidParameter(
                "edge probability 0 cannot reach t requests per client".into(),
            ));
        }
    }
    let mut requests = Vec::with_capacity(n);
    for (i, &p) in probs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut attempts = 0u32;
        let r = loop {
            let r: Vec<usize> = (0..m).filter(|_| rng.gen_bool(p)).collect();
            if r.len() >= t {
                break r;
            }
            attempts += 1;
            if attempts >= MAX_RESAMPLES {
                return Err(Error::InvalidParameter(format!(
                    "client {} did not reach {} requests after {} resamples (p = {})",
                    i + 1,
                    t,
                    MAX_RESAMPLES,
                    p
                )));
            }
        };
        requests.push(r);
    }
    Instance::new(m, t, requests)
}

/// Wire format: `{"m": int, "n": int, "t": int, "requests": [[int,...],...]}`
/// with 1-based message indices.
#[derive(Serialize, Deserialize, Clone)]
struct InstanceJson {
    m: usize,
    n: usize,
    t: usize,
    requests: Vec<Vec<usize>>,
}

impl TryFrom<InstanceJson> for Instance {
    type Error = Error;

    fn try_from(j: InstanceJson) -> Result<Self> {
        if j.requests.len() != j.n {
            return Err(Error::InvalidParameter(format!(
                "requests list {} clients, header says {}",
                j.requests.len(),
                j.n
            )));
        }
        let requests = j
            .requests
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.into_iter()
                    .map(|x| {
                        if x == 0 {
                            Err(Error::InvalidParameter(format!(
                                "client {} uses index 0; message indices are 1-based",
                                i + 1
                            )))
                        } else {
                            Ok(x - 1)
                        }
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Instance::new(j.m, j.t, requests)
    }
}

impl From<Instance> for InstanceJson {
    fn from(inst: Instance) -> Self {
        InstanceJson {
            m: inst.m,
            n: inst.requests.len(),
            t: inst.t,
            requests: inst
                .requests
                .iter()
                .map(|r| r.iter().map(|&j| j + 1).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_three_enumerates_subsets_in_order() {
        let inst = generate(&GenSpec::Complete { m: 3 }).unwrap();
        assert_eq!(inst.n(), 7);
        let expected: Vec<Vec<usize>> = vec![
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![0, 1, 2],
        ];
        assert_eq!(inst.requests(), expected.as_slice());
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn complete_contains_every_subset_once() {
        for m in 1..=6 {
            let inst = generate(&GenSpec::Complete { m }).unwrap();
            assert_eq!(inst.n(), (1 << m) - 1);
            let mut seen: Vec<Vec<usize>> = inst.requests().to_vec();
            seen.sort();
            seen.dedup();
            assert_eq!(seen.len(), inst.n());
        }
    }

    #[test]
    fn complete_t_shares_type2_messages() {
        let inst = generate(&GenSpec::CompleteT { m: 4, t: 2 }).unwrap();
        assert_eq!(inst.n(), 7);
        assert_eq!(inst.m(), 4);
        for r in inst.requests() {
            assert!(r.contains(&3));
            assert!(r.len() >= 2);
        }
        // the request set paired with {1} is {1, 4} in 1-based terms
        assert_eq!(inst.request(0), &[0, 3]);
        // intersection of all request sets is exactly the shared tail
        let mut common: Vec<usize> = inst.request(0).to_vec();
        for r in inst.requests() {
            common.retain(|j| r.contains(j));
        }
        assert_eq!(common, vec![3]);
    }

    #[test]
    fn complete_t_rejects_m_below_t() {
        assert!(generate(&GenSpec::CompleteT { m: 2, t: 3 }).is_err());
    }

    #[test]
    fn complete_t_with_t_one_is_complete() {
        let a = generate(&GenSpec::CompleteT { m: 4, t: 1 }).unwrap();
        let b = generate(&GenSpec::Complete { m: 4 }).unwrap();
        assert_eq!(a.requests(), b.requests());
    }

    #[test]
    fn random_generation_is_deterministic() {
        let spec = GenSpec::Random {
            m: 6,
            n: 12,
            p: 0.3,
            t: 1,
            seed: 1,
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        for r in a.requests() {
            assert!(!r.is_empty());
        }
    }

    #[test]
    fn random_respects_t_minimum() {
        let inst = generate(&GenSpec::Random {
            m: 8,
            n: 30,
            p: 0.35,
            t: 3,
            seed: 9,
        })
        .unwrap();
        for r in inst.requests() {
            assert!(r.len() >= 3);
        }
    }

    #[test]
    fn random_rejects_p_zero() {
        assert!(generate(&GenSpec::Random {
            m: 4,
            n: 3,
            p: 0.0,
            t: 1,
            seed: 0,
        })
        .is_err());
    }

    #[test]
    fn random_edge_count_matches_conditional_mean() {
        // mean edges per client, conditioned on a nonempty request set
        let (m, n, p) = (6usize, 12usize, 0.3f64);
        let expect = m as f64 * p / (1.0 - (1.0 - p).powi(m as i32));
        let mut total = 0usize;
        let trials = 1000u64;
        for seed in 0..trials {
            let inst = generate(&GenSpec::Random { m, n, p, t: 1, seed }).unwrap();
            total += inst.requests().iter().map(|r| r.len()).sum::<usize>();
        }
        let mean = total as f64 / (trials as f64 * n as f64);
        assert!(
            (mean - expect).abs() / expect < 0.05,
            "mean {} expected {}",
            mean,
            expect
        );
    }

    #[test]
    fn random_cell_frequencies_pass_chi_square_sanity() {
        // per-cell frequency against the conditional marginal, aggregated
        // into one chi-square statistic; seeded, so no flakiness
        let (m, n, p) = (5usize, 8usize, 0.4f64);
        let p_cell = p / (1.0 - (1.0 - p).powi(m as i32));
        let trials = 600usize;
        let mut counts = vec![0usize; m * n];
        for seed in 0..trials {
            let inst = generate(&GenSpec::Random {
                m,
                n,
                p,
                t: 1,
                seed: seed as u64,
            })
            .unwrap();
            for (i, r) in inst.requests().iter().enumerate() {
                for &j in r {
                    counts[i * m + j] += 1;
                }
            }
        }
        let expected = trials as f64 * p_cell;
        let var = trials as f64 * p_cell * (1.0 - p_cell);
        let stat: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / var
            })
            .sum();
        let df = (m * n) as f64;
        assert!(
            stat < df + 5.0 * (2.0 * df).sqrt(),
            "chi-square statistic {} too large for {} cells",
            stat,
            df
        );
    }

    #[test]
    fn heterogeneous_blocks_use_their_probabilities() {
        let inst = generate(&GenSpec::Heterogeneous {
            m: 40,
            n: 9,
            group_probs: vec![0.05, 0.95],
            t: 1,
            seed: 3,
        })
        .unwrap();
        // first block of 4 clients is sparse, last block of 5 dense
        let sparse: usize = inst.requests()[..4].iter().map(|r| r.len()).sum();
        let dense: usize = inst.requests()[4..].iter().map(|r| r.len()).sum();
        assert!(sparse < dense, "sparse {} dense {}", sparse, dense);
    }

    #[test]
    fn validate_reports_errors_and_warnings() {
        let ok = generate(&GenSpec::Complete { m: 3 }).unwrap();
        assert!(ok.validate().is_empty());

        let empty = Instance::new(3, 1, vec![vec![0], vec![]]).unwrap();
        let violations = empty.validate();
        assert_eq!(violations.len(), 1);
        assert!(matches!(
            violations[0],
            Violation::EmptyRequestSet { client: 1 }
        ));

        let dup = Instance::new(3, 1, vec![vec![0, 2], vec![0, 2]]).unwrap();
        let violations = dup.validate();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].severity(), Severity::Warning);

        let out_of_range = Instance::new(2, 1, vec![vec![5]]).unwrap();
        assert!(matches!(
            out_of_range.validate()[0],
            Violation::IndexOutOfRange { client: 0, index: 5 }
        ));

        let undersized = Instance::new(3, 2, vec![vec![0]]).unwrap();
        assert!(matches!(
            undersized.validate()[0],
            Violation::TooFewRequests { client: 0, len: 1, t: 2 }
        ));
    }

    #[test]
    fn json_round_trip_is_identity() {
        let inst = generate(&GenSpec::Random {
            m: 5,
            n: 7,
            p: 0.5,
            t: 2,
            seed: 11,
        })
        .unwrap();
        let txt = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&txt).unwrap();
        assert_eq!(inst, back);
        assert_eq!(txt, serde_json::to_string(&back).unwrap());
    }

    #[test]
    fn json_uses_one_based_indices() {
        let inst = generate(&GenSpec::Complete { m: 2 }).unwrap();
        let txt = serde_json::to_string(&inst).unwrap();
        assert_eq!(txt, r#"{"m":2,"n":3,"t":1,"requests":[[1],[2],[1,2]]}"#);
        assert!(serde_json::from_str::<Instance>(
            r#"{"m":2,"n":1,"t":1,"requests":[[0]]}"#
        )
        .is_err());
    }
}

#[cfg(test)]
mod guard_tests {
    use super::*;

    #[test]
    fn complete_size_is_capped() {
        assert!(generate(&GenSpec::Complete { m: 21 }).is_err());
        assert!(generate(&GenSpec::Complete { m: 0 }).is_err());
        assert!(generate(&GenSpec::CompleteT { m: 30, t: 2 }).is_err());
    }

    #[test]
    fn heterogeneous_needs_enough_clients() {
        assert!(generate(&GenSpec::Heterogeneous {
            m: 4,
            n: 2,
            group_probs: vec![0.1, 0.5, 0.9],
            t: 1,
            seed: 0,
        })
        .is_err());
        assert!(generate(&GenSpec::Heterogeneous {
            m: 4,
            n: 2,
            group_probs: vec![],
            t: 1,
            seed: 0,
        })
        .is_err());
    }

    #[test]
    fn complete_t_intersection_is_the_shared_tail() {
        for (m, t) in [(4usize, 2usize), (5, 3), (6, 2), (5, 4)] {
            let inst = generate(&GenSpec::CompleteT { m, t }).unwrap();
            assert_eq!(inst.n(), (1 << (m - t + 1)) - 1);
            let mut common: Vec<usize> = inst.request(0).to_vec();
            for r in inst.requests() {
                assert!(r.len() >= t);
                common.retain(|j| r.contains(j));
            }
            let tail: Vec<usize> = (m - t + 1..m).collect();
            assert_eq!(common, tail, "m = {}, t = {}", m, t);
        }
    }
}
