//! Even permutations of 5 points and the canonical A5 element ordering.
//!
//! The canonical ordering enumerates all 120 permutations of (0,1,2,3,4)
//! in lexicographic one-line order and keeps the 60 even ones, indexed
//! 0..59 in that order. Index 0 is the identity. Every other module
//! (group-ring coefficients, serialization, the Cayley table) is pinned
//! to this ordering.

use std::sync::LazyLock;

use crate::error::{Error, Result};

pub const A5_ORDER: usize = 60;

/// An even permutation of {0,1,2,3,4} in one-line notation:
/// point `i` maps to `images[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm5 {
    images: [u8; 5],
}

impl Perm5 {
    pub const IDENTITY: Perm5 = Perm5 {
        images: [0, 1, 2, 3, 4],
    };

    /// Validates that `images` is a permutation and that it is even.
    pub fn new(images: [u8; 5]) -> Result<Self> {
        let mut seen = [false; 5];
        for &v in &images {
            if v >= 5 || seen[v as usize] {
                return Err(Error::NotAPermutation(images));
            }
            seen[v as usize] = true;
        }
        if !is_even(&images) {
            return Err(Error::OddPermutation(images));
        }
        Ok(Perm5 { images })
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    pub fn images(&self) -> [u8; 5] {
        self.images
    }

    /// Composition with `other` applied first: (self ∘ other)(x) = self(other(x)).
    pub fn compose(&self, other: &Perm5) -> Perm5 {
        let mut images = [0u8; 5];
        for (i, slot) in images.iter_mut().enumerate() {
            *slot = self.images[other.images[i] as usize];
        }
        Perm5 { images }
    }

    pub fn inverse(&self) -> Perm5 {
        let mut images = [0u8; 5];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize] = i as u8;
        }
        Perm5 { images }
    }

    /// Position of this element in the canonical A5 ordering.
    pub fn index(&self) -> usize {
        cayley().index_of(self)
    }

    pub fn from_index(index: usize) -> Perm5 {
        a5_elements()[index]
    }
}

fn is_even(images: &[u8; 5]) -> bool {
    let mut inversions = 0;
    for i in 0..5 {
        for j in (i + 1)..5 {
            if images[i] > images[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// All 60 elements of A5 in canonical order.
pub fn a5_elements() -> &'static [Perm5; A5_ORDER] {
    &cayley().elements
}

/// Precomputed multiplication structure for A5.
pub(crate) struct Cayley {
    pub(crate) elements: [Perm5; A5_ORDER],
    /// product[i][j] = index of elements[i] ∘ elements[j] (j applied first)
    pub(crate) product: [[u8; A5_ORDER]; A5_ORDER],
    pub(crate) inverse: [u8; A5_ORDER],
    /// lexicographic rank of a permutation of 5 points -> A5 index, or 0xff for odd
    rank_to_index: [u8; 120],
}

impl Cayley {
    fn build() -> Cayley {
        let mut elements = [Perm5::IDENTITY; A5_ORDER];
        let mut rank_to_index = [0xffu8; 120];
        let mut count = 0;
        for rank in 0..120 {
            let images = unrank(rank);
            if is_even(&images) {
                elements[count] = Perm5 { images };
                rank_to_index[rank] = count as u8;
                count += 1;
            }
        }
        assert_eq!(count, A5_ORDER);

        let mut product = [[0u8; A5_ORDER]; A5_ORDER];
        for i in 0..A5_ORDER {
            for j in 0..A5_ORDER {
                let composed = elements[i].compose(&elements[j]);
                product[i][j] = rank_to_index[lex_rank(&composed.images)];
            }
        }
        let mut inverse = [0u8; A5_ORDER];
        for i in 0..A5_ORDER {
            inverse[i] = rank_to_index[lex_rank(&elements[i].inverse().images)];
        }

        let table = Cayley {
            elements,
            product,
            inverse,
            rank_to_index,
        };
        table.self_check();
        table
    }

    pub(crate) fn index_of(&self, p: &Perm5) -> usize {
        self.rank_to_index[lex_rank(&p.images)] as usize
    }

    /// Identity row/column, Latin-square property and two-sided inverses.
    /// Full associativity is exercised by the (slow) exhaustive test.
    fn self_check(&self) {
        assert_eq!(self.elements[0], Perm5::IDENTITY);
        for i in 0..A5_ORDER {
            assert_eq!(self.product[0][i] as usize, i);
            assert_eq!(self.product[i][0] as usize, i);
            let mut row_seen = [false; A5_ORDER];
            let mut col_seen = [false; A5_ORDER];
            for j in 0..A5_ORDER {
                row_seen[self.product[i][j] as usize] = true;
                col_seen[self.product[j][i] as usize] = true;
            }
            assert!(row_seen.iter().all(|&s| s) && col_seen.iter().all(|&s| s));
            let inv = self.inverse[i] as usize;
            assert_eq!(self.product[i][inv], 0);
            assert_eq!(self.product[inv][i], 0);
        }
    }
}

/// Lexicographic rank of a permutation of (0,1,2,3,4) via its Lehmer code.
fn lex_rank(images: &[u8; 5]) -> usize {
    const FACT: [usize; 5] = [24, 6, 2, 1, 1];
    let mut rank = 0;
    for i in 0..4 {
        let smaller = images[i + 1..].iter().filter(|&&v| v < images[i]).count();
        rank += smaller * FACT[i];
    }
    rank
}

/// Inverse of `lex_rank`: the permutation with the given lexicographic rank.
fn unrank(mut rank: usize) -> [u8; 5] {
    const FACT: [usize; 5] = [24, 6, 2, 1, 1];
    let mut pool: Vec<u8> = vec![0, 1, 2, 3, 4];
    let mut images = [0u8; 5];
    for (i, slot) in images.iter_mut().enumerate() {
        let idx = rank / FACT[i];
        rank %= FACT[i];
        *slot = pool.remove(idx);
    }
    images
}

static CAYLEY: LazyLock<Cayley> = LazyLock::new(Cayley::build);

pub(crate) fn cayley() -> &'static Cayley {
    &CAYLEY
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(points: &[usize]) -> Perm5 {
        let mut images = [0u8, 1, 2, 3, 4];
        for w in 0..points.len() {
            images[points[w]] = points[(w + 1) % points.len()] as u8;
        }
        Perm5::new(images).unwrap()
    }

    #[test]
    fn identity_composes_trivially() {
        let id = Perm5::IDENTITY;
        assert_eq!(id.compose(&id), id);
    }

    #[test]
    fn three_cycle_times_inverse_is_identity() {
        let c = cycle(&[0, 1, 2]);
        assert_eq!(c.compose(&c.inverse()), Perm5::IDENTITY);
        assert_eq!(c.inverse().compose(&c), Perm5::IDENTITY);
    }

    #[test]
    fn double_transposition_is_involution() {
        // (0 1)(2 3)
        let p = Perm5::new([1, 0, 3, 2, 4]).unwrap();
        assert_eq!(p.inverse(), p);
        assert_eq!(p.compose(&p), Perm5::IDENTITY);
    }

    #[test]
    fn rejects_non_permutations_and_odd_ones() {
        assert!(matches!(
            Perm5::new([0, 0, 2, 3, 4]),
            Err(Error::NotAPermutation(_))
        ));
        assert!(matches!(
            Perm5::new([0, 1, 2, 3, 7]),
            Err(Error::NotAPermutation(_))
        ));
        // single transposition (3 4) is odd
        assert!(matches!(
            Perm5::new([0, 1, 2, 4, 3]),
            Err(Error::OddPermutation(_))
        ));
    }

    #[test]
    fn canonical_ordering_starts_at_identity() {
        let elems = a5_elements();
        assert_eq!(elems[0], Perm5::IDENTITY);
        assert_eq!(elems.len(), 60);
        // lexicographic: consecutive elements strictly increase as tuples
        for w in elems.windows(2) {
            assert!(w[0].images() < w[1].images());
        }
    }

    #[test]
    fn index_round_trip() {
        for i in 0..A5_ORDER {
            assert_eq!(Perm5::from_index(i).index(), i);
        }
    }

    #[test]
    fn compose_convention_applies_right_factor_first() {
        let a = cycle(&[0, 1, 2]);
        let b = cycle(&[2, 3, 4]);
        let ab = a.compose(&b);
        for x in 0..5 {
            assert_eq!(ab.apply(x), a.apply(b.apply(x)));
        }
    }
}
