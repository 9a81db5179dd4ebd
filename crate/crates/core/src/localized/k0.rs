//! Truncated Grothendieck groups of S⁻¹(Vect) via Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::smooth::{int_wire, SRational, SmoothNumber};

/// `D = P·A·Q` with `D` diagonal; `Q` and `Q⁻¹` are kept, `P` is not needed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// nonzero diagonal entries, each dividing the next
    pub invariant_factors: Vec<BigInt>,
    pub q: Vec<Vec<BigInt>>,
    pub q_inv: Vec<Vec<BigInt>>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Smith normal form of an integer matrix with `cols` columns.
pub fn smith_normal_form(rows: &[Vec<BigInt>], cols: usize) -> SmithForm {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nr = a.len();
    let mut q = identity(cols);
    let mut q_inv = identity(cols);

    // column op col_j -= k·col_t, tracked in Q and Q⁻¹
    let col_sub = |a: &mut Vec<Vec<BigInt>>, q: &mut Vec<Vec<BigInt>>, qi: &mut Vec<Vec<BigInt>>, j: usize, t: usize, k: &BigInt| {
        for row in a.iter_mut() {
            let v = &row[t] * k;
            row[j] -= v;
        }
        for row in q.iter_mut() {
            let v = &row[t] * k;
            row[j] -= v;
        }
        let (rt, rj) = (qi[t].clone(), &qi[j]);
        qi[t] = rt.iter().zip(rj).map(|(x, y)| x + k * y).collect();
    };
    let col_swap = |a: &mut Vec<Vec<BigInt>>, q: &mut Vec<Vec<BigInt>>, qi: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        for row in a.iter_mut().chain(q.iter_mut()) {
            row.swap(i, j);
        }
        qi.swap(i, j);
    };

    let mut factors = Vec::new();
    for t in 0..nr.min(cols) {
        // smallest nonzero entry of the remaining block becomes the pivot
        let pick = |a: &Vec<Vec<BigInt>>| {
            (t..nr)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by_key(|&(i, j)| a[i][j].abs())
        };
        let Some((pi, pj)) = pick(&a) else { break };
        a.swap(t, pi);
        col_swap(&mut a, &mut q, &mut q_inv, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..nr {
                if a[i][t].is_zero() {
                    continue;
                }
                let k = a[i][t].div_floor(&a[t][t]);
                let pivot_row = a[t].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &k * y;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let k = a[t][j].div_floor(&a[t][t]);
                col_sub(&mut a, &mut q, &mut q_inv, j, t, &k);
                dirty |= !a[t][j].is_zero();
            }
            if !dirty {
                // the pivot must divide the rest of the block
                let bad = (t + 1..nr).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
                match bad {
                    Some(i) => {
                        let row_i = a[i].clone();
                        for (x, y) in a[t].iter_mut().zip(&row_i) {
                            *x += y;
                        }
                    }
                    None => break,
                }
            }
            if let Some((pi, pj)) = pick(&a) {
                if a[pi][pj].abs() < a[t][t].abs() || a[t][t].is_zero() {
                    a.swap(t, pi);
                    col_swap(&mut a, &mut q, &mut q_inv, t, pj);
                }
            }
        }
        factors.push(a[t][t].abs());
    }
    SmithForm { invariant_factors: factors, q, q_inv }
}

/// The presentation of `K₀` truncated at the divisors of `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct K0Presentation {
    pub bound: SmoothNumber,
    /// generator `g_m` for each divisor `m`, increasing
    pub generators: Vec<SmoothNumber>,
    /// each relation `g_m − k·g_{mk}` as a coefficient row
    #[serde(serialize_with = "int_wire::matrix")]
    pub relations: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "int_wire::vec")]
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
    /// invariant factors greater than one
    #[serde(serialize_with = "int_wire::vec")]
    pub torsion: Vec<BigInt>,
    /// a free generator in the `g` basis
    #[serde(serialize_with = "int_wire::matrix")]
    pub free_generator: Vec<Vec<BigInt>>,
    /// class of each `g_m` in S⁻¹ℤ, namely `1/m`
    pub class_map: Vec<SRational>,
    /// class of the free generator
    pub generator_class: Vec<SRational>,
    /// image of each `g_m` in the free part, in units of the generator
    #[serde(serialize_with = "int_wire::matrix")]
    pub coordinates: Vec<Vec<BigInt>>,
}

pub fn k0_presentation(bound: &SmoothNumber) -> K0Presentation {
    let generators = bound.divisors();
    let n = generators.len();
    let mut relations = Vec::new();
    for (i, m) in generators.iter().enumerate() {
        for (j, mk) in generators.iter().enumerate() {
            if let Some(k) = m.divides(mk).filter(|k| !k.is_one()) {
                let mut row = vec![BigInt::zero(); n];
                row[i] = BigInt::one();
                row[j] = -BigInt::from(k.value());
                relations.push(row);
            }
        }
    }
    let snf = smith_normal_form(&relations, n);
    let rank = snf.invariant_factors.len();
    let class_map: Vec<SRational> = generators.iter().map(|m| SRational::from_parts(1, m)).collect();
    let class_of = |v: &[BigInt]| {
        v.iter().zip(&class_map).fold(SRational::zero(), |acc, (c, cls)| {
            acc.add(&cls.scale(c.clone())).expect("denominators divide the bound")
        })
    };
    let mut free_generator: Vec<Vec<BigInt>> =
        (rank..n).map(|r| snf.q_inv[r].clone()).collect();
    // a relation row x becomes x·Q, so g_m has coordinates Q[m][r]
    let mut coordinates: Vec<Vec<BigInt>> =
        (0..n).map(|g| (rank..n).map(|r| snf.q[g][r].clone()).collect()).collect();
    // orient each free generator so its class is positive
    for (r, v) in free_generator.iter_mut().enumerate() {
        if class_of(v).numer().is_negative() {
            v.iter_mut().for_each(|x| *x = -x.clone());
            coordinates.iter_mut().for_each(|row| row[r] = -row[r].clone());
        }
    }
    let generator_class = free_generator.iter().map(|v| class_of(v)).collect();
    K0Presentation {
        bound: bound.clone(),
        generators,
        relations,
        torsion: snf.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect(),
        invariant_factors: snf.invariant_factors,
        free_rank: n - rank,
        free_generator,
        class_map,
        generator_class,
        coordinates,
    }
}
