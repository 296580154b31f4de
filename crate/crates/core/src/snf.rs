//! Smith normal form over the integers and finitely generated abelian groups.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnfError {
    #[error("integer overflow during elimination")]
    Overflow,
    #[error("ragged matrix: row {0} has {1} entries, expected {2}")]
    Ragged(usize, usize, usize),
}

type Mat = Vec<Vec<i128>>;

/// `u · m · v = d` with `d` diagonal, `d[i] | d[i+1]`, `u`, `v` unimodular.
#[derive(Clone, Debug)]
pub struct Snf {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero diagonal entries, positive.
    pub diag: Vec<i128>,
    pub u: Mat,
    pub v: Mat,
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn ck(x: Option<i128>) -> Result<i128, SnfError> {
    x.ok_or(SnfError::Overflow)
}

/// `row_a ← row_a + k·row_b`.
fn add_row(m: &mut Mat, a: usize, b: usize, k: i128) -> Result<(), SnfError> {
    for j in 0..m[a].len() {
        let t = ck(m[b][j].checked_mul(k))?;
        m[a][j] = ck(m[a][j].checked_add(t))?;
    }
    Ok(())
}

fn add_col(m: &mut Mat, a: usize, b: usize, k: i128) -> Result<(), SnfError> {
    for row in m.iter_mut() {
        let t = ck(row[b].checked_mul(k))?;
        row[a] = ck(row[a].checked_add(t))?;
    }
    Ok(())
}

fn swap_cols(m: &mut Mat, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn negate_row(m: &mut Mat, a: usize) {
    for x in m[a].iter_mut() {
        *x = -*x;
    }
}

pub fn smith_normal_form(m: &[Vec<i128>], cols: usize) -> Result<Snf, SnfError> {
    for (i, r) in m.iter().enumerate() {
        if r.len() != cols {
            return Err(SnfError::Ragged(i, r.len(), cols));
        }
    }
    let rows = m.len();
    let mut a: Mat = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero magnitude in the remaining block
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].unsigned_abs())
        else {
            break;
        };
        a.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut a, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(p);
                    add_row(&mut a, i, t, -q)?;
                    add_row(&mut u, i, t, -q)?;
                    if a[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(p);
                    add_col(&mut a, j, t, -q)?;
                    add_col(&mut v, j, t, -q)?;
                    if a[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                // divisibility of the rest of the block by the pivot
                let bad =
                    (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    None => break,
                    Some((i, _)) => {
                        add_row(&mut a, t, i, 1)?;
                        add_row(&mut u, t, i, 1)?;
                        continue;
                    }
                }
            }
            // move the smallest entry of row/col t onto the pivot
            let (mut bi, mut bj, mut best) = (t, t, a[t][t].unsigned_abs());
            for i in t + 1..rows {
                if a[i][t] != 0 && a[i][t].unsigned_abs() < best {
                    (bi, bj, best) = (i, t, a[i][t].unsigned_abs());
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 && a[t][j].unsigned_abs() < best {
                    (bi, bj, best) = (t, j, a[t][j].unsigned_abs());
                }
            }
            if bi != t {
                a.swap(t, bi);
                u.swap(t, bi);
            }
            if bj != t {
                swap_cols(&mut a, t, bj);
                swap_cols(&mut v, t, bj);
            }
        }
        if a[t][t] < 0 {
            negate_row(&mut a, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    let diag = (0..t).map(|i| a[i][i]).collect();
    Ok(Snf { rows, cols, diag, u, v })
}

/// `Z^rank ⊕ ⊕ Z/torsion[i]`, torsion factors `> 1` in divisibility order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<u128>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { rank: 0, torsion: Vec::new() }
    }

    /// Invariant factors with free summands written as `0`.
    pub fn invariant_factors(&self) -> Vec<u128> {
        let mut out = self.torsion.clone();
        out.extend(std::iter::repeat_n(0, self.rank));
        out
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// Cokernel of a relation matrix: `Z^gens` modulo the row span.
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub gens: usize,
    snf: Snf,
}

impl Cokernel {
    pub fn new(gens: usize, relations: &[Vec<i128>]) -> Result<Cokernel, SnfError> {
        Ok(Cokernel { gens, snf: smith_normal_form(relations, gens)? })
    }

    pub fn group(&self) -> AbelianGroup {
        AbelianGroup {
            rank: self.gens - self.snf.diag.len(),
            torsion: self.snf.diag.iter().filter(|&&d| d > 1).map(|&d| d as u128).collect(),
        }
    }

    /// Whether `x` lies in the row span, i.e. is zero in the cokernel.
    pub fn is_zero(&self, x: &[i128]) -> Result<bool, SnfError> {
        let v = &self.snf.v;
        for j in 0..self.gens {
            let mut z: i128 = 0;
            for (i, &xi) in x.iter().enumerate() {
                z = ck(z.checked_add(ck(xi.checked_mul(v[i][j]))?))?;
            }
            let ok = match self.snf.diag.get(j) {
                Some(&d) => z % d == 0,
                None => z == 0,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_class(&self, x: &[i128], y: &[i128]) -> Result<bool, SnfError> {
        let d: Vec<i128> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero(&d)
    }
}

pub fn abelian_group(gens: usize, relations: &[Vec<i128>]) -> Result<AbelianGroup, SnfError> {
    Ok(Cokernel::new(gens, relations)?.group())
}
