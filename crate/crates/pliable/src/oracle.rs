//! Ground-truth optima by exhaustive search, for desk-scale instances only.
//!
//! [`optimal_code_length`] enumerates every K×m coding matrix column by
//! column and returns the smallest K admitting a code that satisfies every
//! client. Zero columns are enumerated too: they keep themselves out of every
//! span, and some instances reach their optimum only that way (with
//! R_1 = {1,2,3} and R_2 = {2}, the single row (0 1 0) satisfies both clients
//! but no zero-free single row does). [`minrank_fit`] instead enumerates the fitting matrices G
//! (one 1 on each request set, zeros elsewhere on it, free values on the side
//! information) and minimizes rank(G); the two agree on every t = 1 instance.
//! Both refuse searches beyond a hard feasibility budget instead of running
//! for hours.

use crate::error::{Error, Result};
use crate::gf::{Matrix, ModBasis, PrimeField, XorBasis};
use crate::instance::Instance;

/// Enumeration ceiling for the optimal-length search: q^(K·m) states.
const OPT_BUDGET: u128 = 1 << 30;
/// Enumeration ceiling for the minrank search.
const MINRANK_BUDGET: u128 = 1 << 28;

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// K*: the optimal linear code length.
    pub optimal_len: usize,
    /// The first satisfying matrix in enumeration order.
    pub witness: Matrix,
    /// Assignments evaluated, summed over every length tried.
    pub matrices_examined: u64,
}

/// Smallest K <= k_max for which some K×m code over F_q satisfies every
/// client (t of their requests decodable). The feasibility guard is applied
/// per K actually enumerated, so a search that succeeds early never trips on
/// the cost of a larger K.
pub fn optimal_code_length(inst: &Instance, q: u32, k_max: usize) -> Result<OracleResult> {
    inst.require_valid()?;
    let field = PrimeField::new(q)?;
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let m = inst.m();
    // small request sets fail fastest; check them first
    let mut clients: Vec<&Vec<usize>> = inst.requests().iter().collect();
    clients.sort_by_key(|r| r.len());
    let mut examined = 0u64;
    for k in 1..=k_max {
        let states = (q as u128).checked_pow((k * m) as u32);
        match states {
            Some(s) if s <= OPT_BUDGET => {}
            _ => {
                return Err(Error::InfeasibleSearch(format!(
                    "enumerating length {} needs {}^{} > 2^30 matrices",
                    k, q, k * m
                )))
            }
        }
        let found = if q == 2 {
            search_gf2(k, m, &clients, inst.t(), &mut examined)
        } else {
            search_modq(field, k, m, &clients, inst.t(), &mut examined)
        };
        if let Some(witness) = found {
            return Ok(OracleResult {
                optimal_len: k,
                witness,
                matrices_examined: examined,
            });
        }
    }
    Err(Error::NoCodeWithinLimit { k_max })
}

fn xor_insert(basis: &mut [u32; 32], mut v: u32) {
    while v != 0 {
        let h = 31 - v.leading_zeros() as usize;
        if basis[h] == 0 {
            basis[h] = v;
            return;
        }
        v ^= basis[h];
    }
}

fn xor_reduce(basis: &[u32; 32], mut v: u32) -> u32 {
    while v != 0 {
        let h = 31 - v.leading_zeros() as usize;
        if basis[h] == 0 {
            return v;
        }
        v ^= basis[h];
    }
    0
}

fn client_satisfied_gf2(cols: &[u32], r: &[usize], t: usize) -> bool {
    let mut cnt = 0usize;
    for (pos, &j) in r.iter().enumerate() {
        if cnt + (r.len() - pos) < t {
            return false;
        }
        let mut basis = [0u32; 32];
        for &j2 in r {
            if j2 != j {
                xor_insert(&mut basis, cols[j2]);
            }
        }
        if xor_reduce(&basis, cols[j]) != 0 {
            cnt += 1;
            if cnt >= t {
                return true;
            }
        }
    }
    false
}

fn search_gf2(
    k: usize,
    m: usize,
    clients: &[&Vec<usize>],
    t: usize,
    examined: &mut u64,
) -> Option<Matrix> {
    let full = 1u32 << k;
    let mut cols = vec![0u32; m];
    loop {
        *examined += 1;
        if clients.iter().all(|r| client_satisfied_gf2(&cols, r, t)) {
            let rows = (0..k)
                .map(|row| (0..m).map(|j| cols[j] >> row & 1).collect())
                .collect();
            return Some(Matrix::from_rows(2, m, rows).expect("bits are reduced"));
        }
        // odometer, rightmost column least significant
        let mut c = m;
        loop {
            if c == 0 {
                return None;
            }
            c -= 1;
            cols[c] += 1;
            if cols[c] < full {
                break;
            }
            cols[c] = 0;
        }
    }
}

fn client_satisfied_modq(
    field: PrimeField,
    k: usize,
    cols: &[Vec<u32>],
    r: &[usize],
    t: usize,
) -> bool {
    let mut cnt = 0usize;
    for (pos, &j) in r.iter().enumerate() {
        if cnt + (r.len() - pos) < t {
            return false;
        }
        let mut basis = ModBasis::new(field, k);
        for &j2 in r {
            if j2 != j {
                basis.insert(cols[j2].clone());
            }
        }
        if !basis.reduces_to_zero(cols[j].clone()) {
            cnt += 1;
            if cnt >= t {
                return true;
            }
        }
    }
    false
}

/// Base-q counter over a column; returns true when it wrapped back to zero
/// and the next column must advance.
fn advance_column(col: &mut [u32], q: u32) -> bool {
    for d in col.iter_mut() {
        *d += 1;
        if *d < q {
            return false;
        }
        *d = 0;
    }
    true
}

/// The first nonzero column, when there is one, must lead with a 1; scaling
/// one column never changes any span membership.
fn canonical_assignment(cols: &[Vec<u32>]) -> bool {
    for col in cols {
        if let Some(&d) = col.iter().find(|&&d| d != 0) {
            return d == 1;
        }
    }
    true
}

fn search_modq(
    field: PrimeField,
    k: usize,
    m: usize,
    clients: &[&Vec<usize>],
    t: usize,
    examined: &mut u64,
) -> Option<Matrix> {
    let q = field.q();
    let mut cols: Vec<Vec<u32>> = vec![vec![0; k]; m];
    loop {
        if canonical_assignment(&cols) {
            *examined += 1;
            if clients
                .iter()
                .all(|r| client_satisfied_modq(field, k, &cols, r, t))
            {
                let rows = (0..k)
                    .map(|row| (0..m).map(|j| cols[j][row]).collect())
                    .collect();
                return Some(Matrix::from_rows(q, m, rows).expect("digits are reduced"));
            }
        }
        let mut c = m;
        loop {
            if c == 0 {
                return None;
            }
            c -= 1;
            if !advance_column(&mut cols[c], q) {
                break;
            }
        }
    }
}

/// Minimum rank over all matrices fitting the instance: row i carries a
/// single 1 at one requested message, zeros on the rest of the request set,
/// and arbitrary field values on the side information.
pub fn minrank_fit(inst: &Instance, q: u32) -> Result<usize> {
    inst.require_valid()?;
    if inst.t() != 1 {
        return Err(Error::InvalidParameter(
            "the fitting-matrix characterization applies to t = 1 instances".into(),
        ));
    }
    let field = PrimeField::new(q)?;
    let m = inst.m();
    let n = inst.n();

    let mut states: u128 = 1;
    for r in inst.requests() {
        let side = (m - r.len()) as u32;
        let per_row = (r.len() as u128)
            .saturating_mul((q as u128).checked_pow(side).unwrap_or(u128::MAX));
        states = states.saturating_mul(per_row);
        if states > MINRANK_BUDGET {
            return Err(Error::InfeasibleSearch(
                "more than 2^28 fitting matrices".into(),
            ));
        }
    }

    let sides: Vec<Vec<usize>> = inst
        .requests()
        .iter()
        .map(|r| (0..m).filter(|j| !r.contains(j)).collect())
        .collect();
    // per-row state: which requested message holds the 1, plus side values
    let mut choice = vec![0usize; n];
    let mut side_vals: Vec<Vec<u32>> = sides.iter().map(|s| vec![0u32; s.len()]).collect();

    let mut best = usize::MAX;
    loop {
        let rank = if q == 2 {
            let mut basis = XorBasis::new(m);
            for i in 0..n {
                let mut words = vec![0u64; m.div_ceil(64)];
                words[inst.request(i)[choice[i]] / 64] |=
                    1u64 << (inst.request(i)[choice[i]] % 64);
                for (pos, &j) in sides[i].iter().enumerate() {
                    if side_vals[i][pos] == 1 {
                        words[j / 64] |= 1u64 << (j % 64);
                    }
                }
                basis.insert(words);
            }
            basis.rank()
        } else {
            let mut basis = ModBasis::new(field, m);
            for i in 0..n {
                let mut row = vec![0u32; m];
                row[inst.request(i)[choice[i]]] = 1;
                for (pos, &j) in sides[i].iter().enumerate() {
                    row[j] = side_vals[i][pos];
                }
                basis.insert(row);
            }
            basis.rank()
        };
        if rank < best {
            best = rank;
            if best == 1 {
                return Ok(1);
            }
        }
        // advance the per-row odometer
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            let r_len = inst.request(i).len();
            if !advance_row_state(&mut choice[i], &mut side_vals[i], r_len, q) {
                break;
            }
        }
    }
}

/// Advances one row's (choice, side values) state; returns true on wrap.
fn advance_row_state(choice: &mut usize, side: &mut [u32], r_len: usize, q: u32) -> bool {
    for d in side.iter_mut() {
        *d += 1;
        if *d < q {
            return false;
        }
        *d = 0;
    }
    *choice += 1;
    if *choice < r_len {
        return false;
    }
    *choice = 0;
    true
}
