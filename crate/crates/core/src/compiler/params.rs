//! Parameter selection for the compiled binary tag system.
//!
//! Given a cyclic program of length `p = 3k + 2` with longest appendant `r`,
//! the compiler picks the even scale `x` with `p | 3x - 2` and `r < x/2 - 7`,
//! replicates the program to length `3x - 2`, and derives the shift-change
//! constants and the deletion number from `x` alone.

use super::CompileError;

/// Derived quantities for one compile. All identities are exact integers:
/// `z1 = 3x^2 + x`, `z2 = 3x^2 - 2x`, `beta = z1 (3x - 2) = z2 (3x + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub k: usize,
    pub q: usize,
    pub x: usize,
    /// Replicated program length `3x - 2`.
    pub p_prime: usize,
    pub z1: usize,
    pub z2: usize,
    pub beta: usize,
    /// Longest-appendant length of the source program.
    pub r: usize,
}

impl Params {
    fn derive(x: usize, p: usize, r: usize) -> Result<Params, CompileError> {
        let reason = |msg: &str| CompileError::InvalidX {
            x,
            reason: msg.to_string(),
        };
        if x % 2 != 0 {
            return Err(reason("x must be even"));
        }
        if x <= 14 {
            return Err(reason("x must exceed 14"));
        }
        if 2 * r + 14 >= x {
            return Err(reason("longest appendant must satisfy r < x/2 - 7"));
        }
        if (3 * x - 2) % p != 0 {
            return Err(reason("program length must divide 3x - 2"));
        }
        let z1 = 3 * x * x + x;
        let z2 = 3 * x * x - 2 * x;
        let beta = z1 * (3 * x - 2);
        debug_assert_eq!(z2 * (3 * x + 1), beta);
        Ok(Params {
            k: (p - 2).div_euclid(3),
            q: (3 * x - 2) / p,
            x,
            p_prime: 3 * x - 2,
            z1,
            z2,
            beta,
            r,
        })
    }

    /// `|u| = (3x + 1) beta - 3x`.
    pub fn u_len(&self) -> usize {
        (3 * self.x + 1) * self.beta - 3 * self.x
    }

    /// Number of `u`s in each object template.
    pub fn slots(&self, kind: ObjKind) -> usize {
        match kind {
            ObjKind::One | ObjKind::Zero => self.x + 1,
            ObjKind::EpsPrime | ObjKind::OnePrime => self.x,
            ObjKind::Eps => 1,
        }
    }

    /// Expanded object length.
    pub fn object_len(&self, kind: ObjKind) -> usize {
        match kind {
            ObjKind::One | ObjKind::Zero => (self.x + 1) * self.u_len() + 2 * self.x,
            ObjKind::Eps => self.u_len() + 3 * self.x,
            ObjKind::EpsPrime | ObjKind::OnePrime => self.x * self.u_len() + 2 * self.x,
        }
    }

    /// Shift change of an expanded object.
    pub fn object_shift_change(&self, kind: ObjKind) -> usize {
        match kind {
            ObjKind::One | ObjKind::Zero => self.z1,
            ObjKind::Eps => 0,
            ObjKind::EpsPrime | ObjKind::OnePrime => self.z2,
        }
    }

    /// Symbols read consuming an object entered with shift `z` (Lemma 2).
    pub fn object_reads(&self, kind: ObjKind, z: usize) -> usize {
        let len = self.object_len(kind);
        let s = (self.beta - len % self.beta) % self.beta;
        if s == 0 || z < self.beta - s {
            len.div_ceil(self.beta)
        } else {
            len / self.beta
        }
    }

    /// `z >= beta - shift_change`: the floor-read case for this object.
    pub fn is_low_case(&self, kind: ObjKind, z: usize) -> bool {
        let s = self.object_shift_change(kind);
        s > 0 && z >= self.beta - s
    }
}

use super::template::ObjKind;

/// Picks the minimal feasible `x` (or validates an override) and fills all
/// derived quantities.
///
/// The program length must be `p = 3k + 2`; other arities are rejected.
pub fn select_params(
    p: usize,
    r: usize,
    x_override: Option<usize>,
) -> Result<Params, CompileError> {
    if p == 0 || p % 3 != 2 {
        return Err(CompileError::UnsupportedArity { p });
    }
    if let Some(x) = x_override {
        return Params::derive(x, p, r);
    }
    let mut x = 16;
    // 3x - 2 runs over all residues mod p as even x grows; the loop is a
    // defensive cap, not a real bound.
    while x < 1 << 24 {
        if (3 * x - 2) % p == 0 && 2 * r + 14 < x {
            return Params::derive(x, p, r);
        }
        x += 2;
    }
    Err(CompileError::NoFeasibleX { p, r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_x_for_two_appendants() {
        let p = select_params(2, 0, None).unwrap();
        assert_eq!(
            (p.x, p.q, p.z1, p.z2, p.beta),
            (16, 23, 784, 736, 36064)
        );
        assert_eq!(p.p_prime, 46);
        assert_eq!(p.u_len(), 1_767_088);
    }

    #[test]
    fn longer_appendants_push_x_up() {
        let p = select_params(2, 2, None).unwrap();
        assert_eq!((p.x, p.q, p.beta), (20, 29, 70760));
    }

    #[test]
    fn arity_five() {
        let p = select_params(5, 1, None).unwrap();
        assert_eq!((p.x, p.q), (24, 14));
    }

    #[test]
    fn rejects_bad_arity() {
        assert!(matches!(
            select_params(3, 0, None),
            Err(CompileError::UnsupportedArity { p: 3 })
        ));
    }

    #[test]
    fn override_is_validated() {
        assert!(select_params(2, 0, Some(15)).is_err());
        assert!(select_params(2, 0, Some(14)).is_err());
        assert!(select_params(2, 1, Some(16)).is_err());
        let p = select_params(2, 0, Some(24)).unwrap();
        assert_eq!(p.x, 24);
        assert_eq!(p.beta, 122_640);
    }

    #[test]
    fn identities_hold_across_scales() {
        for x in [16, 18, 20, 22, 24, 30] {
            let p = select_params(2, 0, Some(x)).unwrap();
            assert_eq!(p.z1 * (3 * x - 2), p.beta);
            assert_eq!((p.z2 * (3 * x + 1)) % p.beta, 0);
            assert_eq!(p.u_len() % p.beta, p.beta - 3 * x);
        }
    }
}
