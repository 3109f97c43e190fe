//! Deterministic child generation by segment inversion in the gray domain.
//!
//! A parent of `L` bits has `2L - 1` children. Each child is produced
//! independently from the parent alone: gray-encode the whole string, invert
//! one contiguous segment, decode back. Which segments are used is a
//! [`MaskFamily`]:
//!
//! * [`MaskFamily::SegmentTree`] (default): the nodes of a balanced binary
//!   split of the bit positions, stage by stage. Stage 0 is the whole string,
//!   stage 1 its two halves, and so on down to single bits. A full binary tree
//!   over `L` leaves has exactly `2L - 1` nodes.
//! * [`MaskFamily::BitsAndSuffixes`]: the `L` single bits (MSB to LSB), then
//!   the `L - 1` suffixes `i..L` for `i = 0..L-1` (longest first). In the
//!   binary domain these are the tail reflections and the Hamming-1 moves.

use std::collections::VecDeque;
use std::ops::Range;

use crate::bitcodec::{from_gray_in_place, to_gray, BitString};
use crate::error::{DgoError, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum MaskFamily {
    #[default]
    SegmentTree,
    BitsAndSuffixes,
}

impl MaskFamily {
    pub fn masks(self, len: usize) -> Result<Vec<SegmentMask>> {
        if len == 0 {
            return Err(DgoError::EmptyBitString);
        }
        let segments = match self {
            Self::SegmentTree => tree_segments(len),
            Self::BitsAndSuffixes => (0..len)
                .map(|i| i..i + 1)
                .chain((0..len - 1).map(|i| i..len))
                .collect(),
        };
        debug_assert_eq!(segments.len(), child_count(len));
        Ok(segments
            .into_iter()
            .enumerate()
            .map(|(index, segment)| SegmentMask {
                segment,
                len,
                index,
            })
            .collect())
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SegmentTree => "tree",
            Self::BitsAndSuffixes => "suffix",
        }
    }
}

impl std::str::FromStr for MaskFamily {
    type Err = DgoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(Self::SegmentTree),
            "suffix" => Ok(Self::BitsAndSuffixes),
            other => Err(DgoError::InvalidParameter(format!(
                "unknown mask family {other:?} (expected tree or suffix)"
            ))),
        }
    }
}

/// Breadth-first nodes of the balanced split of `0..len`; on odd lengths the
/// left half takes the extra bit.
fn tree_segments(len: usize) -> Vec<Range<usize>> {
    let mut out = Vec::with_capacity(child_count(len));
    let mut queue = VecDeque::new();
    queue.push_back(0..len);
    while let Some(r) = queue.pop_front() {
        if r.len() > 1 {
            let mid = r.start + r.len().div_ceil(2);
            queue.push_back(r.start..mid);
            queue.push_back(mid..r.end);
        }
        out.push(r);
    }
    out
}

/// One contiguous segment of the gray-coded string to invert.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMask {
    segment: Range<usize>,
    len: usize,
    /// Ordinal in the family's canonical order, `0..2L-1`.
    pub index: usize,
}

impl SegmentMask {
    pub fn segment(&self) -> Range<usize> {
        self.segment.clone()
    }

    /// The mask as an explicit bit string of length `L`.
    pub fn mask(&self) -> BitString {
        let mut bits = vec![false; self.len];
        self.apply(&mut bits);
        BitString::new(bits).expect("mask length is positive")
    }

    /// XORs the mask into `bits` in place.
    pub fn apply(&self, bits: &mut [bool]) {
        debug_assert_eq!(bits.len(), self.len);
        bits[self.segment.clone()]
            .iter_mut()
            .for_each(|b| *b ^= true);
    }
}

/// Number of children produced from a string of `len` bits.
pub fn child_count(len: usize) -> usize {
    2 * len - 1
}

/// The default family's masks for strings of length `len`.
pub fn segment_masks(len: usize) -> Result<Vec<SegmentMask>> {
    MaskFamily::default().masks(len)
}

/// The children of one parent, in canonical mask order.
///
/// All children share one flat buffer (`2L - 1` runs of `L` bits), so a
/// batch costs a single allocation however long the strings are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildSet {
    pub parent: BitString,
    bits: Vec<bool>,
}

impl ChildSet {
    pub fn len(&self) -> usize {
        self.bits.len() / self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Length of every child (and of the parent).
    pub fn bit_len(&self) -> usize {
        self.parent.len()
    }

    /// Child `i` as a bit slice.
    pub fn child(&self, i: usize) -> &[bool] {
        let l = self.bit_len();
        &self.bits[i * l..(i + 1) * l]
    }

    /// Child `i` as an owned [`BitString`].
    pub fn child_string(&self, i: usize) -> BitString {
        BitString::new(self.child(i).to_vec()).expect("length preserved")
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, bool> {
        self.bits.chunks_exact(self.bit_len())
    }

    /// The children `range.start..range.end` as consecutive slices.
    pub fn range(&self, range: Range<usize>) -> std::slice::ChunksExact<'_, bool> {
        let l = self.bit_len();
        self.bits[range.start * l..range.end * l].chunks_exact(l)
    }

    pub fn to_bit_strings(&self) -> Vec<BitString> {
        (0..self.len()).map(|i| self.child_string(i)).collect()
    }
}

/// Applies one mask: gray-encode, invert the segment, decode back.
pub fn transform(parent: &BitString, mask: &SegmentMask) -> BitString {
    let mut bits = to_gray(parent).into_inner();
    mask.apply(&mut bits);
    from_gray_in_place(&mut bits);
    BitString::new(bits).expect("length preserved")
}

pub fn generate_children(parent: &BitString) -> ChildSet {
    generate_children_with(parent, MaskFamily::default())
}

pub fn generate_children_with(parent: &BitString, family: MaskFamily) -> ChildSet {
    let masks = family
        .masks(parent.len())
        .expect("bit strings are never empty");
    generate_children_from(parent, &masks)
}

/// Children for a precomputed mask list (which must match the parent's
/// length), in the list's order.
pub fn generate_children_from(parent: &BitString, masks: &[SegmentMask]) -> ChildSet {
    let l = parent.len();
    let mut bits = to_gray(parent).as_slice().repeat(masks.len());
    for (m, child) in masks.iter().zip(bits.chunks_exact_mut(l)) {
        assert_eq!(m.len, l, "mask length differs from the parent");
        m.apply(child);
        from_gray_in_place(child);
    }
    ChildSet {
        parent: parent.clone(),
        bits,
    }
}
