//! Object templates and the read patterns that append them.
//!
//! The five objects are skeletons over `{b, U}` where `U` marks a `u`-slot:
//!
//! - `<0>`  = b^4 u b^2 u^{x-1} b^2 u b^{2x-8}
//! - `<1>`  = b^10 (u b b)^{x/2-7} u^{x/2+7} b^2 u b^{x+2}
//! - `<e>`  = b^2 u b^{3x-2}
//! - `<e'>` = b^4 u b^2 u^{x-2} b^2 u b^{2x-8}
//! - `<1>'` = `<1>` with one u removed from the u^{x/2+7} run
//!
//! A track whose image under `b -> b`, `c -> u` is an object is that object's
//! read pattern; full patterns have length `3x + 1`, the `<e'>` pattern and
//! the short forms have length `3x`.

use crate::bits::PackedWord;
use crate::compiler::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjKind {
    One,
    Zero,
    Eps,
    EpsPrime,
    OnePrime,
}

pub const OBJECT_KINDS: [ObjKind; 5] = [
    ObjKind::One,
    ObjKind::Zero,
    ObjKind::Eps,
    ObjKind::EpsPrime,
    ObjKind::OnePrime,
];

impl ObjKind {
    pub fn label(self) -> &'static str {
        match self {
            ObjKind::One => "1",
            ObjKind::Zero => "0",
            ObjKind::Eps => "e",
            ObjKind::EpsPrime => "e'",
            ObjKind::OnePrime => "1'",
        }
    }

    pub fn parse_label(s: &str) -> Option<ObjKind> {
        Some(match s {
            "1" => ObjKind::One,
            "0" => ObjKind::Zero,
            "e" => ObjKind::Eps,
            "e'" => ObjKind::EpsPrime,
            "1'" => ObjKind::OnePrime,
            _ => return None,
        })
    }

    /// Payload objects encode cyclic dataword symbols; the rest are garbage.
    pub fn is_payload(self) -> bool {
        matches!(self, ObjKind::One | ObjKind::Zero | ObjKind::OnePrime)
    }

    pub fn payload_bit(self) -> Option<bool> {
        match self {
            ObjKind::One | ObjKind::OnePrime => Some(true),
            ObjKind::Zero => Some(false),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seg {
    B(usize),
    U,
}

/// Skeleton over `{b, U}` for one object.
pub fn skeleton(kind: ObjKind, x: usize) -> Vec<Seg> {
    use Seg::*;
    let mut segs = Vec::new();
    match kind {
        ObjKind::Zero | ObjKind::EpsPrime => {
            let run = if kind == ObjKind::Zero { x - 1 } else { x - 2 };
            segs.push(B(4));
            segs.push(U);
            segs.push(B(2));
            segs.extend(std::iter::repeat_n(U, run));
            segs.push(B(2));
            segs.push(U);
            segs.push(B(2 * x - 8));
        }
        ObjKind::One | ObjKind::OnePrime => {
            let run = if kind == ObjKind::One {
                x / 2 + 7
            } else {
                x / 2 + 6
            };
            segs.push(B(10));
            for _ in 0..x / 2 - 7 {
                segs.push(U);
                segs.push(B(2));
            }
            segs.extend(std::iter::repeat_n(U, run));
            segs.push(B(2));
            segs.push(U);
            segs.push(B(x + 2));
        }
        ObjKind::Eps => {
            segs.push(B(2));
            segs.push(U);
            segs.push(B(3 * x - 2));
        }
    }
    segs
}

/// An object template plus its expanded length at the given parameters.
#[derive(Debug, Clone)]
pub struct ObjectTemplate {
    pub kind: ObjKind,
    pub skeleton: Vec<Seg>,
    pub expanded_length: usize,
}

impl ObjectTemplate {
    pub fn new(kind: ObjKind, params: &Params) -> ObjectTemplate {
        let skeleton = skeleton(kind, params.x);
        let expanded_length: usize = skeleton
            .iter()
            .map(|s| match s {
                Seg::B(n) => *n,
                Seg::U => params.u_len(),
            })
            .sum();
        debug_assert_eq!(expanded_length, params.object_len(kind));
        ObjectTemplate {
            kind,
            skeleton,
            expanded_length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternForm {
    Full,
    /// Short form missing its leading `b` (the object's own leading `b`
    /// completes it when entered with shift 0).
    DropLeading,
    /// Short form missing its trailing `b` (a `b`-run to the right of the
    /// `u` completes it).
    DropTrailing,
}

/// The read sequence whose image under `b -> b`, `c -> u` is the object
/// (Figure 3 of the construction): e.g. the `<e>` pattern is `b^2 c b^{3x-2}`.
pub fn read_pattern(kind: ObjKind, x: usize, form: PatternForm) -> Vec<bool> {
    let mut p: Vec<bool> = Vec::with_capacity(3 * x + 1);
    let b = |n: usize, p: &mut Vec<bool>| p.extend(std::iter::repeat_n(false, n));
    match kind {
        ObjKind::Zero | ObjKind::EpsPrime => {
            let run = if kind == ObjKind::Zero { x - 1 } else { x - 2 };
            b(4, &mut p);
            p.push(true);
            b(2, &mut p);
            p.extend(std::iter::repeat_n(true, run));
            b(2, &mut p);
            p.push(true);
            b(2 * x - 8, &mut p);
        }
        ObjKind::One | ObjKind::OnePrime => {
            let run = if kind == ObjKind::One {
                x / 2 + 7
            } else {
                x / 2 + 6
            };
            b(10, &mut p);
            for _ in 0..x / 2 - 7 {
                p.push(true);
                b(2, &mut p);
            }
            p.extend(std::iter::repeat_n(true, run));
            b(2, &mut p);
            p.push(true);
            b(x + 2, &mut p);
        }
        ObjKind::Eps => {
            b(2, &mut p);
            p.push(true);
            b(3 * x - 2, &mut p);
        }
    }
    match form {
        PatternForm::Full => p,
        PatternForm::DropLeading => {
            assert!(!p[0], "short form must drop a b");
            p.remove(0);
            p
        }
        PatternForm::DropTrailing => {
            assert!(!p[p.len() - 1], "short form must drop a b");
            p.pop();
            p
        }
    }
}

/// Substitutes `u` into every `U` slot of the skeleton.
pub fn expand_object(template: &ObjectTemplate, u: &PackedWord) -> PackedWord {
    let mut out = PackedWord::with_capacity(template.expanded_length);
    for seg in &template.skeleton {
        match seg {
            Seg::B(n) => {
                let mut rem = *n;
                while rem >= 64 {
                    out.push_word(0, 64);
                    rem -= 64;
                }
                out.push_word(0, rem);
            }
            Seg::U => out.extend_from(u),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::select_params;

    #[test]
    fn pattern_lengths() {
        for x in [16usize, 20, 24] {
            assert_eq!(read_pattern(ObjKind::One, x, PatternForm::Full).len(), 3 * x + 1);
            assert_eq!(read_pattern(ObjKind::Zero, x, PatternForm::Full).len(), 3 * x + 1);
            assert_eq!(read_pattern(ObjKind::Eps, x, PatternForm::Full).len(), 3 * x + 1);
            assert_eq!(
                read_pattern(ObjKind::EpsPrime, x, PatternForm::Full).len(),
                3 * x
            );
            assert_eq!(
                read_pattern(ObjKind::OnePrime, x, PatternForm::Full).len(),
                3 * x
            );
        }
    }

    #[test]
    fn eps_pattern_shape() {
        let x = 16;
        let p = read_pattern(ObjKind::Eps, x, PatternForm::Full);
        // b^2 c b^{3x-2}
        assert!(!p[0] && !p[1] && p[2]);
        assert!(p[3..].iter().all(|&b| !b));
        let short = read_pattern(ObjKind::Eps, x, PatternForm::DropTrailing);
        assert_eq!(short.len(), 3 * x);
        assert_eq!(&short[..], &p[..3 * x]);
        let lead = read_pattern(ObjKind::Eps, x, PatternForm::DropLeading);
        assert_eq!(&lead[..], &p[1..]);
    }

    #[test]
    fn pattern_image_is_object() {
        // Applying b -> b, c -> u to a full pattern must reproduce the
        // expanded object exactly.
        let params = select_params(2, 0, None).unwrap();
        // A stand-in u with the right length is enough for this check.
        let mut u = PackedWord::zeros(params.u_len());
        for i in (0..u.len()).step_by(9973) {
            u.set(i, true);
        }
        for kind in OBJECT_KINDS {
            let pattern = read_pattern(kind, params.x, PatternForm::Full);
            let mut image = PackedWord::new();
            for bit in pattern {
                if bit {
                    image.extend_from(&u);
                } else {
                    image.push(false);
                }
            }
            let tpl = ObjectTemplate::new(kind, &params);
            let expanded = expand_object(&tpl, &u);
            assert_eq!(image.len(), expanded.len(), "{kind:?}");
            assert!(image.eq_range(0, &expanded, 0, expanded.len()), "{kind:?}");
            assert_eq!(expanded.len(), params.object_len(kind), "{kind:?}");
        }
    }
}
