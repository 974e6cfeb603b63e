//! Arithmetic in the cyclic group `Z/N` and permutations of its elements.

use std::fmt;

use thiserror::Error;

/// Largest modulus accepted anywhere in the crate.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("modulus {0} is outside 1..=2^31-1")]
    BadModulus(u64),
    #[error("incompatible groups: Z/{left} and Z/{right}")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("image {value} at position {position} is not an element of Z/{modulus}")]
    ImageOutOfRange { position: usize, value: u32, modulus: u32 },
    #[error("value {value} appears twice (positions {first} and {second})")]
    RepeatedImage { value: u32, first: usize, second: usize },
    #[error("empty permutation")]
    Empty,
}

fn check_modulus(n: u64) -> Result<u32, GroupError> {
    if n == 0 || n > MAX_MODULUS {
        Err(GroupError::BadModulus(n))
    } else {
        Ok(n as u32)
    }
}

/// An element of `Z/N`, always stored in normalized form `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u32,
    modulus: u32,
}

impl Residue {
    /// Builds a residue, reducing `value` (which may be negative) mod `modulus`.
    pub fn new(value: i64, modulus: u64) -> Result<Self, GroupError> {
        let n = check_modulus(modulus)?;
        Ok(Residue {
            value: value.rem_euclid(n as i64) as u32,
            modulus: n,
        })
    }

    pub fn zero(modulus: u64) -> Result<Self, GroupError> {
        Self::new(0, modulus)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    fn same_group(self, other: Residue) -> Result<(), GroupError> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(GroupError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            })
        }
    }
}

impl std::ops::Neg for Residue {
    type Output = Residue;

    fn neg(self) -> Residue {
        Residue {
            value: sub_mod(0, self.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, n: u32) -> u32 {
    ((a as u64 + b as u64) % n as u64) as u32
}

#[inline]
pub(crate) fn sub_mod(a: u32, b: u32, n: u32) -> u32 {
    ((a as u64 + n as u64 - (b % n) as u64) % n as u64) as u32
}

pub fn mod_add(a: Residue, b: Residue) -> Result<Residue, GroupError> {
    a.same_group(b)?;
    Ok(Residue {
        value: add_mod(a.value, b.value, a.modulus),
        modulus: a.modulus,
    })
}

pub fn mod_sub(a: Residue, b: Residue) -> Result<Residue, GroupError> {
    a.same_group(b)?;
    Ok(Residue {
        value: sub_mod(a.value, b.value, a.modulus),
        modulus: a.modulus,
    })
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Additive order of `a`: the smallest `n >= 1` with `n * a == 0`.
pub fn element_order(a: Residue) -> u32 {
    let n = a.modulus as u64;
    (n / gcd(a.value as u64, n)) as u32
}

/// A bijection of `Z/N` onto itself, stored as its image sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self, GroupError> {
        if images.is_empty() {
            return Err(GroupError::Empty);
        }
        let n = check_modulus(images.len() as u64)?;
        let mut seen = vec![usize::MAX; images.len()];
        for (position, &value) in images.iter().enumerate() {
            if value >= n {
                return Err(GroupError::ImageOutOfRange {
                    position,
                    value,
                    modulus: n,
                });
            }
            let slot = &mut seen[value as usize];
            if *slot != usize::MAX {
                return Err(GroupError::RepeatedImage {
                    value,
                    first: *slot,
                    second: position,
                });
            }
            *slot = position;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Result<Self, GroupError> {
        Self::new((0..n as u32).collect())
    }

    /// Caller guarantees `images` is a bijection of `0..images.len()`.
    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::new(images.clone()).is_ok());
        Permutation { images }
    }

    pub fn modulus(&self) -> u32 {
        self.images.len() as u32
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, i: u32) -> u32 {
        self.images[i as usize]
    }

    pub fn into_images(self) -> Vec<u32> {
        self.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.images {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// With `exclude_zero`, position 0 is ignored (canonical third rows fix 0).
pub fn is_fixed_point_free(p: &Permutation, exclude_zero: bool) -> bool {
    let start = usize::from(exclude_zero);
    p.images.iter().enumerate().skip(start).all(|(i, &v)| v as usize != i)
}

/// Number of derangements of `m` elements.
///
/// Uses `D_m = (m-1)(D_{m-1} + D_{m-2})`. Panics if the result does not fit
/// in a `u128` (first happens past `m = 34`).
pub fn count_derangements(m: u32) -> u128 {
    let (mut prev, mut cur) = (1u128, 0u128); // D_0, D_1
    if m == 0 {
        return 1;
    }
    for k in 2..=m as u128 {
        let next = (k - 1)
            .checked_mul(cur + prev)
            .expect("derangement count overflows u128");
        prev = cur;
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64, n: u64) -> Residue {
        Residue::new(v, n).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(mod_add(r(3, 5), r(4, 5)).unwrap(), r(2, 5));
        assert_eq!(mod_add(r(0, 7), r(0, 7)).unwrap(), r(0, 7));
        assert_eq!(mod_add(r(6, 7), r(1, 7)).unwrap(), r(0, 7));
    }

    #[test]
    fn sub_examples() {
        assert_eq!(mod_sub(r(1, 9), r(2, 9)).unwrap(), r(8, 9));
        for x in 0..11 {
            assert_eq!(mod_sub(r(x, 11), r(x, 11)).unwrap(), r(0, 11));
        }
        assert_eq!(mod_sub(r(0, 4), r(3, 4)).unwrap(), r(1, 4));
    }

    #[test]
    fn mismatched_moduli_rejected() {
        assert_eq!(
            mod_add(r(1, 5), r(1, 6)),
            Err(GroupError::ModulusMismatch { left: 5, right: 6 })
        );
        assert!(mod_sub(r(1, 5), r(1, 7)).is_err());
    }

    #[test]
    fn constructor_normalizes() {
        assert_eq!(r(-1, 9).value(), 8);
        assert_eq!(r(23, 9).value(), 5);
        assert!(Residue::new(0, 0).is_err());
        assert!(Residue::new(0, MAX_MODULUS + 1).is_err());
        assert_eq!(r(5, MAX_MODULUS).value(), 5);
        assert_eq!((-r(-1, MAX_MODULUS)).value(), 1);
    }

    #[test]
    fn order_examples() {
        assert_eq!(element_order(r(3, 6)), 2);
        assert_eq!(element_order(r(0, 5)), 1);
        assert_eq!(element_order(r(2, 9)), 9);
    }

    #[test]
    fn order_divides_modulus_and_order_two_elements() {
        for n in 1..=64u64 {
            let mut order_two = 0;
            for v in 0..n as i64 {
                let o = element_order(r(v, n)) as u64;
                assert_eq!(n % o, 0);
                // brute-force smallest multiple hitting zero
                let brute = (1..=n).find(|k| (k * v as u64).is_multiple_of(n)).unwrap();
                assert_eq!(o, brute);
                if o == 2 {
                    order_two += 1;
                }
            }
            assert_eq!(order_two, if n % 2 == 0 { 1 } else { 0 }, "n = {n}");
        }
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 2, 1]).is_ok());
        assert_eq!(
            Permutation::new(vec![0, 1, 1]),
            Err(GroupError::RepeatedImage {
                value: 1,
                first: 1,
                second: 2
            })
        );
        assert!(matches!(
            Permutation::new(vec![0, 3, 1]),
            Err(GroupError::ImageOutOfRange { .. })
        ));
        assert_eq!(Permutation::new(vec![]), Err(GroupError::Empty));
    }

    #[test]
    fn fixed_point_examples() {
        let swap = Permutation::new(vec![0, 2, 1]).unwrap();
        assert!(is_fixed_point_free(&swap, true));
        assert!(!is_fixed_point_free(&swap, false));
        assert!(!is_fixed_point_free(&Permutation::identity(5).unwrap(), true));
        assert!(!is_fixed_point_free(&Permutation::identity(5).unwrap(), false));
        let four_cycle = Permutation::new(vec![0, 2, 3, 4, 1]).unwrap();
        assert!(is_fixed_point_free(&four_cycle, true));
    }

    fn brute_derangements(m: usize) -> u128 {
        fn rec(pos: usize, m: usize, used: &mut [bool]) -> u128 {
            if pos == m {
                return 1;
            }
            let mut total = 0;
            for v in 0..m {
                if v != pos && !used[v] {
                    used[v] = true;
                    total += rec(pos + 1, m, used);
                    used[v] = false;
                }
            }
            total
        }
        rec(0, m, &mut vec![false; m])
    }

    #[test]
    fn derangement_examples() {
        assert_eq!(count_derangements(1), 0);
        assert_eq!(count_derangements(2), 1);
        assert_eq!(count_derangements(3), 2);
        // frozen from brute_derangements(9) over all 9! permutations
        assert_eq!(count_derangements(9), 133496);
        for m in 1..=9 {
            assert_eq!(count_derangements(m as u32), brute_derangements(m), "m = {m}");
        }
    }

    #[test]
    fn derangement_ratio_near_inverse_e() {
        let factorial: u128 = (1..=12u128).product();
        let ratio = count_derangements(12) as f64 / factorial as f64;
        assert!((ratio - (-1f64).exp()).abs() < 1e-8);
        assert!(count_derangements(34) > 0);
    }

    proptest::proptest! {
        #[test]
        fn add_sub_inverse(n in 1u64..1000, a in 0i64..1000, b in 0i64..1000) {
            let (a, b) = (r(a, n), r(b, n));
            proptest::prop_assert_eq!(mod_add(a, mod_sub(b, a).unwrap()).unwrap(), b);
        }
    }
}
