use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::Error;

/// Longest block touched by the copy, insert, delete and splice operators.
pub const MAX_BLOCK_LEN: usize = 64;
/// Largest delta used by the arithmetic operators.
pub const MAX_ARITH_DELTA: u8 = 35;
/// Longest constant run written by `OVERWRITE_FIXED`.
pub const MAX_FIXED_LEN: usize = 4;
/// Longest random block inserted by `INSERT_RAND`.
pub const MAX_INSERT_RAND_LEN: usize = 16;

/// A havoc unit mutation. The discriminant is the stable operator id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Operator {
    FlipBit = 0,
    FlipByte = 1,
    AddByte = 2,
    SubByte = 3,
    RandByte = 4,
    SwapBytes = 5,
    OverwriteFixed = 6,
    OverwriteCopy = 7,
    InsertCopy = 8,
    InsertRand = 9,
    DeleteBytes = 10,
    SpliceOp = 11,
}

impl Operator {
    pub const ALL: [Operator; 12] = [
        Operator::FlipBit,
        Operator::FlipByte,
        Operator::AddByte,
        Operator::SubByte,
        Operator::RandByte,
        Operator::SwapBytes,
        Operator::OverwriteFixed,
        Operator::OverwriteCopy,
        Operator::InsertCopy,
        Operator::InsertRand,
        Operator::DeleteBytes,
        Operator::SpliceOp,
    ];

    /// Length-preserving operators.
    pub const SUBSTITUTION: [Operator; 8] = [
        Operator::FlipBit,
        Operator::FlipByte,
        Operator::AddByte,
        Operator::SubByte,
        Operator::RandByte,
        Operator::SwapBytes,
        Operator::OverwriteFixed,
        Operator::OverwriteCopy,
    ];

    /// Every operator except the splice operator; usable without a donor pool.
    pub const WITHOUT_SPLICE: [Operator; 11] = [
        Operator::FlipBit,
        Operator::FlipByte,
        Operator::AddByte,
        Operator::SubByte,
        Operator::RandByte,
        Operator::SwapBytes,
        Operator::OverwriteFixed,
        Operator::OverwriteCopy,
        Operator::InsertCopy,
        Operator::InsertRand,
        Operator::DeleteBytes,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Operator> {
        Operator::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::FlipBit => "FLIP_BIT",
            Operator::FlipByte => "FLIP_BYTE",
            Operator::AddByte => "ADD_BYTE",
            Operator::SubByte => "SUB_BYTE",
            Operator::RandByte => "RAND_BYTE",
            Operator::SwapBytes => "SWAP_BYTES",
            Operator::OverwriteFixed => "OVERWRITE_FIXED",
            Operator::OverwriteCopy => "OVERWRITE_COPY",
            Operator::InsertCopy => "INSERT_COPY",
            Operator::InsertRand => "INSERT_RAND",
            Operator::DeleteBytes => "DELETE_BYTES",
            Operator::SpliceOp => "SPLICE_OP",
        }
    }

    pub fn is_substitution(self) -> bool {
        Operator::SUBSTITUTION.contains(&self)
    }

    /// Smallest buffer the operator accepts; shorter buffers fall back to
    /// `RAND_BYTE`.
    pub fn min_len(self) -> usize {
        match self {
            Operator::SwapBytes | Operator::OverwriteCopy | Operator::DeleteBytes => 2,
            _ => 1,
        }
    }

    /// Upper bound on the number of byte positions a substitution operator can
    /// change in a buffer of `len` bytes. `None` for length-changing operators,
    /// whose effect on aligned positions is unbounded.
    pub fn max_span(self, len: usize) -> Option<usize> {
        match self {
            Operator::FlipBit
            | Operator::FlipByte
            | Operator::AddByte
            | Operator::SubByte
            | Operator::RandByte => Some(1),
            Operator::SwapBytes => Some(2),
            Operator::OverwriteFixed => Some(MAX_FIXED_LEN.min(len)),
            Operator::OverwriteCopy => Some(MAX_BLOCK_LEN.min(len)),
            _ => None,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Ok(id) = s.parse::<u8>() {
            return Operator::from_id(id).ok_or_else(|| Error::Parse(format!("operator id {id}")));
        }
        Operator::ALL
            .iter()
            .copied()
            .find(|op| op.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown operator `{s}`")))
    }
}

/// Provenance of one unit mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MutationRecord {
    pub operator: Operator,
    pub start_position: usize,
    pub affected_length: usize,
}

impl MutationRecord {
    pub const CSV_HEADER: &'static str = "operator_id,operator,start_position,affected_length";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.operator.id(),
            self.operator.name(),
            self.start_position,
            self.affected_length
        )
    }
}

/// Chooses the start position of a unit mutation.
pub(crate) trait PositionPicker {
    /// Returns a position in `0..valid` for a buffer of `len` bytes
    /// (`1 <= valid <= len`).
    fn pick<R: Rng + ?Sized>(&self, rng: &mut R, valid: usize, len: usize) -> usize;
}

/// Uniform draw over the valid start positions.
pub(crate) struct UniformPositions;

impl PositionPicker for UniformPositions {
    #[inline]
    fn pick<R: Rng + ?Sized>(&self, rng: &mut R, valid: usize, _len: usize) -> usize {
        rng.gen_range(0..valid)
    }
}

/// Apply `op` to `buf` in place and return what was done.
///
/// `buf` must be nonempty. Operators that need more bytes than `buf` has, and
/// the splice operator without donors, degrade to `RAND_BYTE`.
pub(crate) fn apply_in_place<R, P, D>(
    op: Operator,
    buf: &mut Vec<u8>,
    rng: &mut R,
    picker: &P,
    donors: &[D],
) -> MutationRecord
where
    R: Rng + ?Sized,
    P: PositionPicker,
    D: AsRef<[u8]>,
{
    debug_assert!(!buf.is_empty());
    let n = buf.len();
    let op = if n < op.min_len() || (op == Operator::SpliceOp && donors.is_empty()) {
        Operator::RandByte
    } else {
        op
    };

    let (start, len) = match op {
        Operator::FlipBit => {
            let bit = rng.gen_range(0..8u32);
            let off = picker.pick(rng, n, n);
            buf[off] ^= 1 << bit;
            (off, 1)
        }
        Operator::FlipByte => {
            let off = picker.pick(rng, n, n);
            buf[off] ^= 0xff;
            (off, 1)
        }
        Operator::AddByte => {
            let off = picker.pick(rng, n, n);
            let delta = rng.gen_range(1..=MAX_ARITH_DELTA);
            buf[off] = buf[off].wrapping_add(delta);
            (off, 1)
        }
        Operator::SubByte => {
            let off = picker.pick(rng, n, n);
            let delta = rng.gen_range(1..=MAX_ARITH_DELTA);
            buf[off] = buf[off].wrapping_sub(delta);
            (off, 1)
        }
        Operator::RandByte => {
            let off = picker.pick(rng, n, n);
            buf[off] ^= rng.gen_range(1..=255u8);
            (off, 1)
        }
        Operator::SwapBytes => {
            let off = picker.pick(rng, n - 1, n);
            buf.swap(off, off + 1);
            (off, 2)
        }
        Operator::OverwriteFixed => {
            let len = rng.gen_range(1..=MAX_FIXED_LEN.min(n));
            let off = picker.pick(rng, n - len + 1, n);
            let value: u8 = rng.gen();
            buf[off..off + len].fill(value);
            (off, len)
        }
        Operator::OverwriteCopy => {
            let len = rng.gen_range(1..=MAX_BLOCK_LEN.min(n));
            let dst = picker.pick(rng, n - len + 1, n);
            let src = rng.gen_range(0..=n - len);
            buf.copy_within(src..src + len, dst);
            (dst, len)
        }
        Operator::InsertCopy => {
            let len = rng.gen_range(1..=MAX_BLOCK_LEN.min(n));
            let pos = picker.pick(rng, n, n);
            let src = rng.gen_range(0..=n - len);
            let block = buf[src..src + len].to_vec();
            buf.splice(pos..pos, block);
            (pos, len)
        }
        Operator::InsertRand => {
            let len = rng.gen_range(1..=MAX_INSERT_RAND_LEN);
            let pos = picker.pick(rng, n, n);
            let block: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            buf.splice(pos..pos, block);
            (pos, len)
        }
        Operator::DeleteBytes => {
            // Never deletes the whole buffer.
            let len = rng.gen_range(1..=MAX_BLOCK_LEN.min(n - 1));
            let pos = picker.pick(rng, n - len + 1, n);
            buf.drain(pos..pos + len);
            (pos, len)
        }
        Operator::SpliceOp => {
            let donor = donors[rng.gen_range(0..donors.len())].as_ref();
            let insert = rng.gen_bool(0.5);
            let max_len = if insert {
                MAX_BLOCK_LEN.min(donor.len())
            } else {
                MAX_BLOCK_LEN.min(donor.len()).min(n)
            };
            let len = rng.gen_range(1..=max_len);
            let src = rng.gen_range(0..=donor.len() - len);
            let block = &donor[src..src + len];
            if insert {
                let pos = picker.pick(rng, n, n);
                buf.splice(pos..pos, block.iter().copied());
                (pos, len)
            } else {
                let pos = picker.pick(rng, n - len + 1, n);
                buf[pos..pos + len].copy_from_slice(block);
                (pos, len)
            }
        }
    };

    MutationRecord {
        operator: op,
        start_position: start,
        affected_length: len,
    }
}

/// Apply one operator to a copy of `buf` with a uniform start position.
///
/// The splice operator needs a donor pool and falls back to `RAND_BYTE` here;
/// use [`crate::mutation::HavocEngine`] to splice against a corpus.
pub fn apply_operator<R: Rng + ?Sized>(
    op: Operator,
    buf: &[u8],
    rng: &mut R,
) -> Result<(Vec<u8>, MutationRecord), Error> {
    if buf.is_empty() {
        return Err(Error::EmptySeed);
    }
    let mut out = buf.to_vec();
    let record = apply_in_place(op, &mut out, rng, &UniformPositions, &[] as &[&[u8]]);
    Ok((out, record))
}

#[cfg(test)]
mod tests {
    use rand::rngs::mock::StepRng;

    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn ids_round_trip() {
        for op in Operator::ALL {
            assert_eq!(Operator::from_id(op.id()), Some(op));
            assert_eq!(op.name().parse::<Operator>().unwrap(), op);
            assert_eq!(op.id().to_string().parse::<Operator>().unwrap(), op);
        }
        assert!(Operator::from_id(12).is_none());
        assert!("NOPE".parse::<Operator>().is_err());
    }

    #[test]
    fn flip_bit_zero_at_zero() {
        // StepRng(0, 0) yields zero for every draw: bit 0, offset 0.
        let mut rng = StepRng::new(0, 0);
        let (out, rec) = apply_operator(Operator::FlipBit, &[0x00], &mut rng).unwrap();
        assert_eq!(out, vec![0x01]);
        assert_eq!(rec.start_position, 0);
        assert_eq!(rec.affected_length, 1);
    }

    #[test]
    fn flip_bit_is_an_involution() {
        let buf = vec![0x5a, 0x13, 0xff, 0x00, 0x80];
        for s in 0..50 {
            let (once, _) = apply_operator(Operator::FlipBit, &buf, &mut seeded_rng(s)).unwrap();
            let (twice, _) = apply_operator(Operator::FlipBit, &once, &mut seeded_rng(s)).unwrap();
            assert_ne!(once, buf);
            assert_eq!(twice, buf);
        }
    }

    #[test]
    fn delete_shrinks_by_recorded_length() {
        let mut rng = seeded_rng(3);
        for n in 2..200usize {
            let buf: Vec<u8> = (0..n).map(|i| i as u8).collect();
            let (out, rec) = apply_operator(Operator::DeleteBytes, &buf, &mut rng).unwrap();
            assert!(out.len() < n);
            assert!(!out.is_empty());
            assert_eq!(out.len(), n - rec.affected_length);
            // removed block leaves the rest intact
            let mut expect = buf.clone();
            expect.drain(rec.start_position..rec.start_position + rec.affected_length);
            assert_eq!(out, expect);
        }
    }

    #[test]
    fn short_buffers_fall_back_to_rand_byte() {
        let mut rng = seeded_rng(9);
        for op in [Operator::SwapBytes, Operator::OverwriteCopy, Operator::DeleteBytes, Operator::SpliceOp] {
            let (out, rec) = apply_operator(op, &[0x41], &mut rng).unwrap();
            assert_eq!(rec.operator, Operator::RandByte);
            assert_eq!(out.len(), 1);
            assert_ne!(out[0], 0x41);
        }
    }

    #[test]
    fn substitution_preserves_length_and_stays_in_window() {
        let mut rng = seeded_rng(11);
        let buf: Vec<u8> = (0..97u32).map(|i| (i * 37 % 251) as u8).collect();
        for _ in 0..2000 {
            for op in Operator::SUBSTITUTION {
                let (out, rec) = apply_operator(op, &buf, &mut rng).unwrap();
                assert_eq!(out.len(), buf.len());
                assert!(rec.start_position < buf.len());
                let end = rec.start_position + rec.affected_length;
                assert!(end <= buf.len());
                for (i, (a, b)) in buf.iter().zip(&out).enumerate() {
                    if a != b {
                        assert!((rec.start_position..end).contains(&i), "{op} changed {i} outside window");
                    }
                }
                let changed = buf.iter().zip(&out).filter(|(a, b)| a != b).count();
                assert!(changed <= op.max_span(buf.len()).unwrap());
            }
        }
    }

    #[test]
    fn insertions_grow_by_recorded_length() {
        let mut rng = seeded_rng(5);
        let buf = vec![7u8; 40];
        for _ in 0..500 {
            for op in [Operator::InsertCopy, Operator::InsertRand] {
                let (out, rec) = apply_operator(op, &buf, &mut rng).unwrap();
                assert_eq!(out.len(), buf.len() + rec.affected_length);
                assert!(rec.start_position < buf.len());
            }
        }
    }

    #[test]
    fn splice_op_copies_from_donor() {
        let mut rng = seeded_rng(2);
        let donors = [vec![0xEEu8; 30]];
        for _ in 0..200 {
            let mut buf = vec![0u8; 20];
            let rec = apply_in_place(Operator::SpliceOp, &mut buf, &mut rng, &UniformPositions, &donors);
            assert_eq!(rec.operator, Operator::SpliceOp);
            let grown = buf.len() - 20;
            assert!(grown == 0 || grown == rec.affected_length);
            let donor_bytes = buf.iter().filter(|&&b| b == 0xEE).count();
            assert_eq!(donor_bytes, rec.affected_length);
        }
    }
}
