//! Finite presentations of divisible objects with explicit coherence data.
//!
//! For `X = V/ℓ` and a window `W`, slot `i | W` holds `X_i = (W/i)·V`, so that
//! `X_i = j·X_{ij}`. The witness `ρ_{i,j}` sends copy `c` of `X_i` to copy
//! `⌊c/j⌋` in replica `c mod j` of `j·X_{ij}`, flattened replica-major.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::LocObject;
use crate::smooth::SmoothNumber;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DivError {
    #[error("slot {0} is outside the window {1}")]
    OutsideWindow(u64, u64),
    #[error("chain entries must divide each other: {0:?}")]
    NotAChain(Vec<u64>),
    #[error("no witness stored for ({0}, {1})")]
    MissingWitness(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivPresentation {
    pub object: LocObject,
    pub window: SmoothNumber,
    /// `ρ_{i,j}` as a permutation of copy indices of `X_i`
    pub witnesses: BTreeMap<(u64, u64), Vec<usize>>,
}

impl DivPresentation {
    /// The interleave witnesses for every `i·j | W`.
    pub fn standard(object: LocObject, window: SmoothNumber) -> Self {
        let w = window.value();
        let mut witnesses = BTreeMap::new();
        for i in window.divisors() {
            let rest = window.div_exact(&i).expect("i | W");
            for j in rest.divisors() {
                let (iv, jv) = (i.value(), j.value());
                let copies_ij = (w / (iv * jv)) as usize;
                let perm = (0..(w / iv) as usize)
                    .map(|c| (c % jv as usize) * copies_ij + c / jv as usize)
                    .collect();
                witnesses.insert((iv, jv), perm);
            }
        }
        DivPresentation { object, window, witnesses }
    }

    /// Copies of `V` in slot `i`.
    pub fn slot_copies(&self, i: u64) -> usize {
        (self.window.value() / i) as usize
    }

    /// Swaps two images of a witness, for falsifiability checks.
    pub fn corrupt(&mut self, i: u64, j: u64) -> bool {
        match self.witnesses.get_mut(&(i, j)) {
            Some(p) if p.len() >= 2 => {
                p.swap(0, 1);
                true
            }
            _ => false,
        }
    }

    fn witness(&self, i: u64, j: u64) -> Result<&[usize], DivError> {
        self.witnesses.get(&(i, j)).map(Vec::as_slice).ok_or(DivError::MissingWitness(i, j))
    }

    /// Whether the stored witnesses along `i₀ | i₁ | … | iₙ` compose to the
    /// direct witness `ρ_{i₀, iₙ/i₀}`.
    ///
    /// Replica indices combine by `⟨j₁j₂⟩ ≅ ⟨j₁⟩×⟨j₂⟩`, `e ↦ (e mod j₁, ⌊e/j₁⌋)`.
    pub fn coherence_check(&self, chain: &[u64]) -> Result<bool, DivError> {
        let w = self.window.value();
        if let Some(&bad) = chain.iter().find(|&&i| i == 0 || !w.is_multiple_of(i)) {
            return Err(DivError::OutsideWindow(bad, w));
        }
        if chain.windows(2).any(|p| p[1] % p[0] != 0) {
            return Err(DivError::NotAChain(chain.to_vec()));
        }
        let Some((&first, _)) = chain.split_first() else { return Ok(true) };
        let n = self.slot_copies(first);
        // state per starting copy: (combined replica index, replica count, copy in current slot)
        let mut state: Vec<(usize, usize, usize)> = (0..n).map(|c| (0, 1, c)).collect();
        for pair in chain.windows(2) {
            let (i, j) = (pair[0], pair[1] / pair[0]);
            let rho = self.witness(i, j)?;
            let inner = self.slot_copies(pair[1]);
            for (e, count, c) in state.iter_mut() {
                let img = *rho.get(*c).ok_or(DivError::MissingWitness(i, j))?;
                let (replica, copy) = (img / inner, img % inner);
                *e += *count * replica;
                *count *= j as usize;
                *c = copy;
            }
        }
        let last = *chain.last().expect("nonempty");
        let total = last / first;
        if total == 1 {
            return Ok(state.iter().enumerate().all(|(c, &(_, _, d))| c == d));
        }
        let direct = self.witness(first, total)?;
        let inner = self.slot_copies(last);
        Ok(state.iter().enumerate().all(|(c, &(e, _, d))| direct.get(c) == Some(&(e * inner + d))))
    }
}
