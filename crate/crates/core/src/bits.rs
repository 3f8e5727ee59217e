//! Bit-packed words over a two-letter alphabet.
//!
//! Compiled datawords reach 10^7..10^8 symbols, so binary words are stored one
//! bit per symbol in 64-bit blocks. [`PackedDataword`] adds a logical start
//! offset so that deleting the first `beta` symbols is an offset bump, not a
//! copy.
//!
//! Convention: `false` is `0`/`b`, `true` is `1`/`c`.

use std::fmt;

const BITS: usize = u64::BITS as usize;

/// An immutable-length view error for RLE parsing.
#[derive(Debug, thiserror::Error)]
#[error("bad run-length encoding at byte {0}")]
pub struct RleParseError(pub usize);

/// Append-only bit-packed word.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct PackedWord {
    blocks: Vec<u64>,
    len: usize,
}

impl PackedWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        PackedWord {
            blocks: Vec::with_capacity(bits.div_ceil(BITS)),
            len: 0,
        }
    }

    /// All-`false` word of the given length.
    pub fn zeros(len: usize) -> Self {
        PackedWord {
            blocks: vec![0; len.div_ceil(BITS)],
            len,
        }
    }

    #[inline(always)]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline(always)]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline(always)]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.blocks[i / BITS] >> (i % BITS)) & 1 == 1
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.len);
        let (block, off) = (i / BITS, i % BITS);
        if bit {
            self.blocks[block] |= 1 << off;
        } else {
            self.blocks[block] &= !(1 << off);
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len % BITS == 0 {
            self.blocks.push(0);
        }
        if bit {
            let i = self.len;
            *self.blocks.last_mut().unwrap() |= 1 << (i % BITS);
        }
        self.len += 1;
    }

    /// Reads up to 64 bits starting at `pos`, zero-padded past the end.
    #[inline(always)]
    pub fn read_word(&self, pos: usize) -> u64 {
        let block = pos / BITS;
        let off = pos % BITS;
        if block >= self.blocks.len() {
            return 0;
        }
        let lo = self.blocks[block] >> off;
        if off == 0 || block + 1 >= self.blocks.len() {
            lo
        } else {
            lo | (self.blocks[block + 1] << (BITS - off))
        }
    }

    /// Appends the low `n` bits of `w` (n <= 64).
    #[inline]
    pub fn push_word(&mut self, w: u64, n: usize) {
        debug_assert!(n <= BITS);
        if n == 0 {
            return;
        }
        let w = if n == BITS { w } else { w & ((1u64 << n) - 1) };
        let off = self.len % BITS;
        if off == 0 {
            self.blocks.push(w);
        } else {
            *self.blocks.last_mut().unwrap() |= w << off;
            if off + n > BITS {
                self.blocks.push(w >> (BITS - off));
            }
        }
        self.len += n;
    }

    /// Appends `src[start..start + n]` with 64-bit block copies.
    pub fn extend_from_range(&mut self, src: &PackedWord, start: usize, n: usize) {
        debug_assert!(start + n <= src.len);
        let mut pos = start;
        let mut rem = n;
        while rem >= BITS {
            self.push_word(src.read_word(pos), BITS);
            pos += BITS;
            rem -= BITS;
        }
        if rem > 0 {
            self.push_word(src.read_word(pos), rem);
        }
    }

    pub fn extend_from(&mut self, src: &PackedWord) {
        self.extend_from_range(src, 0, src.len);
    }

    /// `self[at..at + n] == other[ostart..ostart + n]`, with early exit.
    pub fn eq_range(&self, at: usize, other: &PackedWord, ostart: usize, n: usize) -> bool {
        debug_assert!(at + n <= self.len && ostart + n <= other.len);
        let mut k = 0;
        while k + BITS <= n {
            if self.read_word(at + k) != other.read_word(ostart + k) {
                return false;
            }
            k += BITS;
        }
        let rem = n - k;
        if rem > 0 {
            let mask = (1u64 << rem) - 1;
            if self.read_word(at + k) & mask != other.read_word(ostart + k) & mask {
                return false;
            }
        }
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut w = PackedWord::new();
        for b in bits {
            w.push(b);
        }
        w
    }

    /// Parses a `{b,c}` or `{0,1}` string.
    pub fn parse_symbols(s: &str) -> Result<Self, RleParseError> {
        let mut w = PackedWord::new();
        for (i, ch) in s.bytes().enumerate() {
            match ch {
                b'b' | b'0' => w.push(false),
                b'c' | b'1' => w.push(true),
                _ => return Err(RleParseError(i)),
            }
        }
        Ok(w)
    }

    /// Run-length encoding over `{b,c}`, e.g. `b4c1b2`.
    pub fn to_rle_bc(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.len {
            let bit = self.get(i);
            let mut j = i + 1;
            while j < self.len && self.get(j) == bit {
                j += 1;
            }
            out.push(if bit { 'c' } else { 'b' });
            out.push_str(&(j - i).to_string());
            i = j;
        }
        out
    }

    pub fn parse_rle_bc(s: &str) -> Result<Self, RleParseError> {
        let bytes = s.as_bytes();
        let mut w = PackedWord::new();
        let mut i = 0;
        while i < bytes.len() {
            let bit = match bytes[i] {
                b'b' => false,
                b'c' => true,
                _ => return Err(RleParseError(i)),
            };
            i += 1;
            let digits_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let count: usize = s[digits_start..i]
                .parse()
                .map_err(|_| RleParseError(digits_start))?;
            for _ in 0..count {
                w.push(bit);
            }
        }
        Ok(w)
    }

    /// `{0,1}` rendering, for small words only.
    pub fn to_string_01(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn to_string_bc(&self) -> String {
        self.iter().map(|b| if b { 'c' } else { 'b' }).collect()
    }
}

impl fmt::Debug for PackedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "PackedWord({})", self.to_string_01())
        } else {
            write!(f, "PackedWord(len={})", self.len)
        }
    }
}

/// A packed dataword: a [`PackedWord`] buffer plus a logical start offset and
/// the leftmost-shift annotation used by the higher modules.
#[derive(Clone, Debug)]
pub struct PackedDataword {
    buf: PackedWord,
    start: usize,
    pub entry_shift: usize,
}

impl PackedDataword {
    pub fn from_word(buf: PackedWord, entry_shift: usize) -> Self {
        PackedDataword {
            buf,
            start: 0,
            entry_shift,
        }
    }

    #[inline(always)]
    pub fn len(&self) -> usize {
        self.buf.len() - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline(always)]
    pub fn get(&self, i: usize) -> bool {
        self.buf.get(self.start + i)
    }

    /// Deletes the first `n` symbols. Amortized O(1): compaction only when the
    /// dead prefix dominates the buffer.
    pub fn drop_front(&mut self, n: usize) {
        debug_assert!(n <= self.len());
        self.start += n;
        if self.start > (1 << 22) && self.start > self.buf.len() / 2 {
            let mut fresh = PackedWord::with_capacity(self.len());
            fresh.extend_from_range(&self.buf, self.start, self.len());
            self.buf = fresh;
            self.start = 0;
        }
    }

    pub fn append_bit(&mut self, bit: bool) {
        self.buf.push(bit);
    }

    pub fn append_word(&mut self, w: &PackedWord) {
        self.buf.extend_from(w);
    }

    /// Compares `self[at..at + n]` against `other[ostart..ostart + n]`.
    pub fn eq_range(&self, at: usize, other: &PackedWord, ostart: usize, n: usize) -> bool {
        self.buf.eq_range(self.start + at, other, ostart, n)
    }

    /// Copies `self[at..at + n]` out as a fresh word.
    pub fn slice(&self, at: usize, n: usize) -> PackedWord {
        let mut w = PackedWord::with_capacity(n);
        w.extend_from_range(&self.buf, self.start + at, n);
        w
    }

    pub fn to_word(&self) -> PackedWord {
        self.slice(0, self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn push_and_get() {
        let bits = [true, false, false, true, true, false];
        let w = PackedWord::from_bits(bits);
        assert_eq!(w.len(), 6);
        for (i, b) in bits.iter().enumerate() {
            assert_eq!(w.get(i), *b);
        }
    }

    #[test]
    fn extend_from_range_matches_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let n = rng.random_range(0..400);
            let src = PackedWord::from_bits((0..n).map(|_| rng.random::<bool>()));
            let pre = rng.random_range(0..130);
            let mut dst = PackedWord::from_bits((0..pre).map(|_| rng.random::<bool>()));
            let start = if n == 0 { 0 } else { rng.random_range(0..n) };
            let take = rng.random_range(0..=(n - start));
            let mut naive: Vec<bool> = dst.iter().collect();
            naive.extend((start..start + take).map(|i| src.get(i)));
            dst.extend_from_range(&src, start, take);
            assert_eq!(dst.len(), naive.len());
            assert!(dst.iter().eq(naive.iter().copied()));
        }
    }

    #[test]
    fn eq_range_matches_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.random_range(1..300);
            let a = PackedWord::from_bits((0..n).map(|_| rng.random::<bool>()));
            let at = rng.random_range(0..n);
            let take = rng.random_range(0..=(n - at));
            let mut b = PackedWord::with_capacity(take);
            b.extend_from_range(&a, at, take);
            assert!(a.eq_range(at, &b, 0, take));
            if take > 0 {
                let mut c = b.clone();
                let flip = rng.random_range(0..take);
                c.set(flip, !c.get(flip));
                assert!(!a.eq_range(at, &c, 0, take));
            }
        }
    }

    #[test]
    fn rle_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let n = rng.random_range(0..200);
            let w = PackedWord::from_bits((0..n).map(|_| rng.random_bool(0.2)));
            let rle = w.to_rle_bc();
            let back = PackedWord::parse_rle_bc(&rle).unwrap();
            assert_eq!(w, back);
        }
    }

    #[test]
    fn dataword_drop_front_and_append() {
        let mut d = PackedDataword::from_word(PackedWord::parse_symbols("0101110").unwrap(), 0);
        d.drop_front(3);
        assert_eq!(d.len(), 4);
        assert_eq!(d.to_word().to_string_01(), "1110");
        d.append_bit(false);
        d.append_bit(false);
        assert_eq!(d.to_word().to_string_01(), "111000");
    }
}
