//! Integral LLL reduction: all Gram-Schmidt data is kept as exact
//! integers (the subdeterminants d_i and the scaled coefficients λ).

use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Lovász parameter 99/100.
const DELTA_NUM: u32 = 99;
const DELTA_DEN: u32 = 100;

struct State {
    b: Vec<Vec<Integer>>,
    d: Vec<Integer>,
    lam: Vec<Vec<Integer>>,
}

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut acc = Integer::new();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Nearest integer to a/b for b > 0, ties away from zero.
fn round_div(a: &Integer, b: &Integer) -> Integer {
    Rational::from((a.clone(), b.clone()))
        .round()
        .numer()
        .clone()
}

impl State {
    // Indices follow the 1-based convention: vector k lives at b[k-1],
    // d[k] belongs to it and d[0] = 1.
    fn reduce(&mut self, k: usize, l: usize) {
        let twice = Integer::from(&self.lam[k][l] * 2u32).abs();
        if twice <= self.d[l] {
            return;
        }
        let q = round_div(&self.lam[k][l], &self.d[l]);
        let (head, tail) = self.b.split_at_mut(k - 1);
        for (x, y) in tail[0].iter_mut().zip(&head[l - 1]) {
            *x -= Integer::from(&q * y);
        }
        let t = Integer::from(&q * &self.d[l]);
        self.lam[k][l] -= t;
        for i in 1..l {
            let t = Integer::from(&q * &self.lam[l][i]);
            self.lam[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k - 1, k - 2);
        for j in 1..k - 1 {
            let t = std::mem::take(&mut self.lam[k][j]);
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let big_b = (Integer::from(&self.d[k - 2] * &self.d[k]) + Integer::from(lam.square_ref()))
            / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            let new_ik = (Integer::from(&self.d[k] * &self.lam[i][k - 1])
                - Integer::from(&lam * &t))
                / &self.d[k - 1];
            let new_ik1 = (Integer::from(&big_b * &t) + Integer::from(&lam * &new_ik)) / &self.d[k];
            self.lam[i][k] = new_ik;
            self.lam[i][k - 1] = new_ik1;
        }
        self.d[k - 1] = big_b;
    }

    fn gram_schmidt_row(&mut self, k: usize) -> Result<()> {
        for j in 1..=k {
            let mut u = dot(&self.b[k - 1], &self.b[j - 1]);
            for i in 1..j {
                u = (Integer::from(&self.d[i] * &u)
                    - Integer::from(&self.lam[k][i] * &self.lam[j][i]))
                    / &self.d[i - 1];
            }
            if j < k {
                self.lam[k][j] = u;
            } else {
                if u <= 0 {
                    return Err(Error::DegenerateBasis(format!(
                        "row {k} is linearly dependent on earlier rows"
                    )));
                }
                self.d[k] = u;
            }
        }
        Ok(())
    }

    fn lovasz_fails(&self, k: usize) -> bool {
        // d_k d_{k−2} < δ d_{k−1}² − λ²_{k,k−1}, scaled by the denominator of δ
        let left = Integer::from(&self.d[k] * &self.d[k - 2]) * DELTA_DEN;
        let right = Integer::from(self.d[k - 1].square_ref()) * DELTA_NUM
            - Integer::from(self.lam[k][k - 1].square_ref()) * DELTA_DEN;
        left < right
    }
}

/// LLL-reduces the rows of `basis` with δ = 0.99 in exact integer
/// arithmetic. Rows must be linearly independent.
pub fn lattice_reduce(basis: &[Vec<Integer>]) -> Result<Vec<Vec<Integer>>> {
    let n = basis.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = basis[0].len();
    if basis.iter().any(|r| r.len() != m) {
        return Err(Error::DegenerateBasis("rows have different lengths".into()));
    }
    let mut st = State {
        b: basis.to_vec(),
        d: vec![Integer::new(); n + 1],
        lam: vec![vec![Integer::new(); n + 1]; n + 1],
    };
    st.d[0] = Integer::from(1);
    st.d[1] = dot(&st.b[0], &st.b[0]);
    if st.d[1] == 0 {
        return Err(Error::DegenerateBasis("first row is zero".into()));
    }
    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            st.gram_schmidt_row(k)?;
        }
        loop {
            st.reduce(k, k - 1);
            if st.lovasz_fails(k) {
                st.swap(k, kmax);
                k = (k - 1).max(2);
            } else {
                break;
            }
        }
        for l in (1..k - 1).rev() {
            st.reduce(k, l);
        }
        k += 1;
    }
    Ok(st.b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<Integer>> {
        v.iter()
            .map(|r| r.iter().map(|&x| Integer::from(x)).collect())
            .collect()
    }

    #[test]
    fn identity_is_reduced() {
        let id = rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(lattice_reduce(&id).unwrap(), id);
    }

    #[test]
    fn small_basis() {
        let b = rows(&[&[1, 0], &[1, 1]]);
        let r = lattice_reduce(&b).unwrap();
        let norms: Vec<Integer> = r.iter().map(|v| dot(v, v)).collect();
        assert!(norms.iter().all(|n| *n == 1));
    }

    #[test]
    fn dependent_rows_rejected() {
        let b = rows(&[&[1, 2], &[2, 4]]);
        assert!(matches!(lattice_reduce(&b), Err(Error::DegenerateBasis(_))));
    }

    #[test]
    fn classic_example() {
        // standard textbook basis; the reduced first vector has norm² 1
        let b = rows(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
        let r = lattice_reduce(&b).unwrap();
        assert_eq!(dot(&r[0], &r[0]), 1);
    }
}
