//! Which messages can a client decode from a coding matrix alone?
//!
//! A client holding everything outside her request set R can recover message
//! j ∈ R exactly when column a_j lies outside the span of the other columns
//! indexed by R. Everything here is rank arithmetic on the matrix; no message
//! payloads are involved (the payload-level check lives in the test oracles).

use crate::error::{Error, Result};
use crate::gf::{Matrix, ModBasis, XorBasis};
use crate::instance::Instance;

/// Per-client decodability under a fixed code. Indices are 0-based, like
/// everything in memory; the CLI converts when printing.
#[derive(Debug, Clone)]
pub struct SatisfactionReport {
    pub t: usize,
    /// D_i: the decodable subset of each client's request set, sorted.
    pub decodable: Vec<Vec<usize>>,
    pub satisfied: Vec<bool>,
    pub satisfied_count: usize,
    pub unsatisfied_count: usize,
}

impl SatisfactionReport {
    pub fn all_satisfied(&self) -> bool {
        self.unsatisfied_count == 0
    }
}

fn check_request(cols: usize, r: &[usize]) -> Result<Vec<usize>> {
    if r.is_empty() {
        return Err(Error::InvalidParameter("request set is empty".into()));
    }
    let mut req = r.to_vec();
    req.sort_unstable();
    req.dedup();
    if let Some(&max) = req.last() {
        if max >= cols {
            return Err(Error::DimensionMismatch(format!(
                "request set references column {} but the code has {} columns",
                max + 1,
                cols
            )));
        }
    }
    Ok(req)
}

/// The set { j ∈ R : a_j ∉ span(A_{R\{j}}) }, sorted.
pub fn decodable_set(a: &Matrix, r: &[usize]) -> Result<Vec<usize>> {
    let req = check_request(a.cols(), r)?;
    if a.q() == 2 {
        let cols: Vec<Vec<u64>> = req.iter().map(|&j| a.column_bits(j)).collect();
        let mut out = Vec::new();
        for (idx, &j) in req.iter().enumerate() {
            let mut basis = XorBasis::new(a.rows());
            for (other, col) in cols.iter().enumerate() {
                if other != idx {
                    basis.insert(col.clone());
                }
            }
            if !basis.reduces_to_zero(cols[idx].clone()) {
                out.push(j);
            }
        }
        Ok(out)
    } else {
        let cols: Vec<Vec<u32>> = req.iter().map(|&j| a.column(j)).collect();
        let mut out = Vec::new();
        for (idx, &j) in req.iter().enumerate() {
            let mut basis = ModBasis::new(a.field(), a.rows());
            for (other, col) in cols.iter().enumerate() {
                if other != idx {
                    basis.insert(col.clone());
                }
            }
            if !basis.reduces_to_zero(cols[idx].clone()) {
                out.push(j);
            }
        }
        Ok(out)
    }
}

/// Evaluates a code against every client of an instance. A client is
/// satisfied when she can decode at least t of her requested messages.
pub fn verify(a: &Matrix, inst: &Instance) -> Result<SatisfactionReport> {
    if a.cols() != inst.m() {
        return Err(Error::DimensionMismatch(format!(
            "code has {} columns, instance has {} messages",
            a.cols(),
            inst.m()
        )));
    }
    let mut decodable = Vec::with_capacity(inst.n());
    let mut satisfied = Vec::with_capacity(inst.n());
    let mut satisfied_count = 0;
    for r in inst.requests() {
        let d = decodable_set(a, r)?;
        let ok = d.len() >= inst.t();
        if ok {
            satisfied_count += 1;
        }
        decodable.push(d);
        satisfied.push(ok);
    }
    Ok(SatisfactionReport {
        t: inst.t(),
        decodable,
        satisfied,
        satisfied_count,
        unsatisfied_count: inst.n() - satisfied_count,
    })
}

/// A code for vector messages: L sub-messages per message, message j owning
/// the contiguous column block j·L .. (j+1)·L of the base matrix.
#[derive(Debug, Clone)]
pub struct VectorCode {
    base: Matrix,
    l: usize,
    m: usize,
}

impl VectorCode {
    pub fn new(base: Matrix, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParameter("L must be at least 1".into()));
        }
        if !base.cols().is_multiple_of(l) {
            return Err(Error::DimensionMismatch(format!(
                "{} columns do not split into blocks of {}",
                base.cols(),
                l
            )));
        }
        let m = base.cols() / l;
        Ok(Self { base, l, m })
    }

    pub fn base(&self) -> &Matrix {
        &self.base
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn block(&self, j: usize) -> Vec<usize> {
        (j * self.l..(j + 1) * self.l).collect()
    }

    /// Equivalent code length K‡ / L.
    pub fn equivalent_length(&self) -> f64 {
        self.base.rows() as f64 / self.l as f64
    }
}

/// Vector decodability: message j is decodable when its column block has full
/// rank L and the block is independent of all other requested blocks, i.e.
/// rank(block_j ∪ rest) = L + rank(rest).
pub fn vector_decodable_set(code: &VectorCode, r: &[usize]) -> Result<Vec<usize>> {
    let req = check_request(code.m(), r)?;
    let mut out = Vec::new();
    for &j in &req {
        let block = code.base.columns_submatrix(&code.block(j));
        if block.rank() != code.l {
            continue;
        }
        let rest_cols: Vec<usize> = req
            .iter()
            .filter(|&&j2| j2 != j)
            .flat_map(|&j2| code.block(j2))
            .collect();
        let rest = code.base.columns_submatrix(&rest_cols);
        let mut all_cols = code.block(j);
        all_cols.extend(rest_cols);
        let all = code.base.columns_submatrix(&all_cols);
        if all.rank() == code.l + rest.rank() {
            out.push(j);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;
    use crate::instance::{generate, GenSpec, Instance};
    use crate::testkit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// The 4-message, 5-client demo instance used throughout the crate.
    fn demo_instance() -> Instance {
        Instance::new(
            4,
            1,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 2, 3],
                vec![1, 3],
            ],
        )
        .unwrap()
    }

    #[test]
    fn client_with_three_requests_decodes_only_first() {
        let a = Matrix::from_rows(2, 4, vec![vec![1, 1, 0, 0], vec![1, 0, 1, 1]]).unwrap();
        assert_eq!(decodable_set(&a, &[0, 2, 3]).unwrap(), vec![0]);
    }

    #[test]
    fn identity_code_decodes_everything() {
        let a = Matrix::identity(PrimeField::new(2).unwrap(), 4);
        assert_eq!(decodable_set(&a, &[1, 3]).unwrap(), vec![1, 3]);
        assert_eq!(decodable_set(&a, &[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn zero_code_decodes_nothing() {
        let a = Matrix::zeros(PrimeField::new(2).unwrap(), 2, 4);
        assert!(decodable_set(&a, &[0, 1, 2]).unwrap().is_empty());
    }

    #[test]
    fn empty_request_set_is_rejected() {
        let a = Matrix::identity(PrimeField::new(2).unwrap(), 2);
        assert!(matches!(
            decodable_set(&a, &[]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn out_of_range_request_is_a_dimension_error() {
        let a = Matrix::identity(PrimeField::new(2).unwrap(), 2);
        assert!(matches!(
            decodable_set(&a, &[0, 5]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn two_row_code_satisfies_the_demo_instance() {
        let inst = demo_instance();
        let a = Matrix::from_rows(2, 4, vec![vec![1, 1, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let report = verify(&a, &inst).unwrap();
        assert!(report.all_satisfied());
        assert_eq!(report.satisfied_count, 5);
    }

    #[test]
    fn t_two_single_client_cases() {
        let inst = Instance::new(2, 2, vec![vec![0, 1]]).unwrap();
        let id = Matrix::identity(PrimeField::new(2).unwrap(), 2);
        assert!(verify(&id, &inst).unwrap().all_satisfied());

        let sum = Matrix::from_rows(2, 2, vec![vec![1, 1]]).unwrap();
        let report = verify(&sum, &inst).unwrap();
        assert!(!report.all_satisfied());
        assert!(report.decodable[0].is_empty());
    }

    #[test]
    fn verify_rejects_shape_mismatch() {
        let inst = demo_instance();
        let a = Matrix::identity(PrimeField::new(2).unwrap(), 3);
        assert!(verify(&a, &inst).is_err());
    }

    #[test]
    fn monotone_under_added_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let q = if rng.gen_bool(0.5) { 2 } else { 3 };
            let k = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=4);
            let rows: Vec<Vec<u32>> = (0..k)
                .map(|_| (0..m).map(|_| rng.gen_range(0..q)).collect())
                .collect();
            let extra: Vec<u32> = (0..m).map(|_| rng.gen_range(0..q)).collect();
            let a = Matrix::from_rows(q, m, rows.clone()).unwrap();
            let mut more = rows;
            more.push(extra);
            let b = Matrix::from_rows(q, m, more).unwrap();
            let r: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.7)).collect();
            if r.is_empty() {
                continue;
            }
            let before = decodable_set(&a, &r).unwrap();
            let after = decodable_set(&b, &r).unwrap();
            for j in &before {
                assert!(after.contains(j), "decodability lost by appending a row");
            }
        }
    }

    #[test]
    fn depends_only_on_requested_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let k = rng.gen_range(1..=3);
            let m = rng.gen_range(2..=5);
            let rows: Vec<Vec<u32>> = (0..k)
                .map(|_| (0..m).map(|_| rng.gen_range(0..2)).collect())
                .collect();
            let a = Matrix::from_rows(2, m, rows.clone()).unwrap();
            let r: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.5)).collect();
            if r.is_empty() {
                continue;
            }
            // scramble the columns outside R
            let mut scrambled = rows;
            for row in &mut scrambled {
                for (j, x) in row.iter_mut().enumerate() {
                    if !r.contains(&j) {
                        *x = rng.gen_range(0..2);
                    }
                }
            }
            let b = Matrix::from_rows(2, m, scrambled).unwrap();
            assert_eq!(
                decodable_set(&a, &r).unwrap(),
                decodable_set(&b, &r).unwrap()
            );
        }
    }

    #[test]
    fn agrees_with_solution_enumeration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
        for _ in 0..200 {
            let q = if rng.gen_bool(0.5) { 2 } else { 3 };
            let k = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=4);
            let a = testkit::random_matrix(&mut rng, q, k, m);
            let b: Vec<u32> = (0..m).map(|_| rng.gen_range(0..q)).collect();
            let r: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.6)).collect();
            if r.is_empty() {
                continue;
            }
            assert_eq!(
                decodable_set(&a, &r).unwrap(),
                testkit::enumeration_decodable_set(&a, &r, &b),
            );
        }
    }

    #[test]
    fn vector_with_l_one_reduces_to_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let k = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=4);
            let a = testkit::random_matrix(&mut rng, 2, k, m);
            let code = VectorCode::new(a.clone(), 1).unwrap();
            let r: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.6)).collect();
            if r.is_empty() {
                continue;
            }
            assert_eq!(
                vector_decodable_set(&code, &r).unwrap(),
                decodable_set(&a, &r).unwrap()
            );
        }
    }

    #[test]
    fn vector_identity_decodes_everything() {
        let base = Matrix::identity(PrimeField::new(2).unwrap(), 6);
        let code = VectorCode::new(base, 2).unwrap();
        assert_eq!(vector_decodable_set(&code, &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn vector_rank_deficient_block_is_excluded() {
        // message 0's two columns are equal; message 1's block has full rank
        // and is independent of block 0
        let base = Matrix::from_rows(
            2,
            4,
            vec![vec![1, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        )
        .unwrap();
        let code = VectorCode::new(base, 2).unwrap();
        assert_eq!(vector_decodable_set(&code, &[0, 1]).unwrap(), vec![1]);

        // when the healthy block leans on the deficient one, both fail
        let tangled = Matrix::from_rows(2, 4, vec![vec![1, 1, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        let tangled = VectorCode::new(tangled, 2).unwrap();
        assert!(vector_decodable_set(&tangled, &[0, 1]).unwrap().is_empty());
        assert_eq!(vector_decodable_set(&tangled, &[1]).unwrap(), vec![1]);
    }

    #[test]
    fn vector_agrees_with_enumeration_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xCAFE);
        for _ in 0..100 {
            let l = rng.gen_range(1..=2);
            let m = rng.gen_range(1..=3);
            let k = rng.gen_range(1..=4);
            let base = testkit::random_matrix(&mut rng, 2, k, m * l);
            let code = VectorCode::new(base, l).unwrap();
            let b: Vec<u32> = (0..m * l).map(|_| rng.gen_range(0..2)).collect();
            let r: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.6)).collect();
            if r.is_empty() {
                continue;
            }
            assert_eq!(
                vector_decodable_set(&code, &r).unwrap(),
                testkit::vector_enumeration_decodable_set(&code, &r, &b),
            );
        }
    }

    #[test]
    fn report_counts_match_flags() {
        let inst = generate(&GenSpec::Random {
            m: 5,
            n: 10,
            p: 0.4,
            t: 1,
            seed: 2,
        })
        .unwrap();
        let a = Matrix::from_rows(2, 5, vec![vec![1, 0, 1, 0, 0]]).unwrap();
        let report = verify(&a, &inst).unwrap();
        assert_eq!(
            report.satisfied.iter().filter(|&&s| s).count(),
            report.satisfied_count
        );
        assert_eq!(report.satisfied_count + report.unsatisfied_count, inst.n());
        for (d, s) in report.decodable.iter().zip(&report.satisfied) {
            assert_eq!(d.len() >= inst.t(), *s);
        }
    }
}
