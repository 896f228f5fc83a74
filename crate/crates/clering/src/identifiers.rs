//! Bit-rank arithmetic on node identifiers.
//!
//! Ids are compared lazily, one set bit at a time, from the most significant
//! set bit downward. `Bit(i, id)` denotes the position of the i-th highest
//! set bit of `id` (rank 1 = the msb), or −1 when `id` has fewer than `i`
//! set bits ("exhausted"). For example id 11 = 0b1011:
//!
//! ```text
//!   rank:      1  2  3  4 ...
//!   position:  3  1  0  −1 ...
//! ```
//!
//! The position sequence of an id is strictly decreasing over its real
//! ranks, and the id is exactly Σ 2^Bit(i,id) over those ranks — both
//! properties are frozen as tests below.

use thiserror::Error;

/// A node identifier. Distinct and ≥ 1 everywhere in this crate.
pub type Id = u64;

/// Sentinel for an exhausted bit rank ("no such set bit").
pub const NO_BIT: i32 = -1;

/// Errors from identifier arithmetic. Both conditions are caller bugs, not
/// protocol states, so they are surfaced as dedicated errors rather than
/// sentinels.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdError {
    /// `msb_position`/`bit_position` require a positive id.
    #[error("id must be >= 1, got {0}")]
    ZeroId(Id),
    /// Bit ranks are 1-based; rank 0 does not exist.
    #[error("bit rank must be >= 1, got 0")]
    ZeroRank,
}

/// Position of the most significant set bit of `id` (`msb(1) = 0`,
/// `msb(11) = 3`).
pub fn msb_position(id: Id) -> Result<u32, IdError> {
    if id == 0 {
        return Err(IdError::ZeroId(id));
    }
    Ok(63 - id.leading_zeros())
}

/// Position of the `rank`-th most significant set bit of `id`, or `None`
/// when `id` has fewer than `rank` set bits.
pub fn bit_position(rank: u32, id: Id) -> Result<Option<u32>, IdError> {
    if rank == 0 {
        return Err(IdError::ZeroRank);
    }
    if id == 0 {
        return Err(IdError::ZeroId(id));
    }
    let mut remaining = id;
    let mut seen = 0;
    while remaining != 0 {
        let pos = 63 - remaining.leading_zeros();
        seen += 1;
        if seen == rank {
            return Ok(Some(pos));
        }
        remaining &= !(1u64 << pos);
    }
    Ok(None)
}

/// `Bit(rank, id)` as the protocol sees it: the bit position as an integer,
/// with −1 for exhausted ranks.
///
/// # Panics
/// On rank 0 or id 0 — both are internal invariants everywhere this is
/// called from the rule system.
#[must_use]
pub fn bit(rank: u32, id: Id) -> i32 {
    match bit_position(rank, id) {
        Ok(Some(pos)) => pos as i32,
        Ok(None) => NO_BIT,
        Err(e) => panic!("bit({rank}, {id}): {e}"),
    }
}

/// Number of set bits of `id` (= the largest rank with a real position).
#[must_use]
pub fn rank_count(id: Id) -> u32 {
    id.count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    // ── Frozen example values ────────────────────────────────────────────

    #[test]
    fn msb_of_small_ids() {
        assert_eq!(msb_position(11).unwrap(), 3);
        assert_eq!(msb_position(1).unwrap(), 0);
        assert_eq!(msb_position(1 << 20).unwrap(), 20);
    }

    #[test]
    fn bit_ranks_of_eleven() {
        // 11 = 0b1011 → positions 3, 1, 0, then exhausted.
        assert_eq!(bit_position(1, 11).unwrap(), Some(3));
        assert_eq!(bit_position(2, 11).unwrap(), Some(1));
        assert_eq!(bit_position(3, 11).unwrap(), Some(0));
        assert_eq!(bit_position(4, 11).unwrap(), None);
        assert_eq!(bit_position(1, 1).unwrap(), Some(0));
        assert_eq!(bit(4, 11), NO_BIT);
        assert_eq!(bit(1, 11), 3);
    }

    #[test]
    fn rank_zero_and_id_zero_are_rejected() {
        assert_eq!(bit_position(0, 11), Err(IdError::ZeroRank));
        assert_eq!(bit_position(1, 0), Err(IdError::ZeroId(0)));
        assert_eq!(msb_position(0), Err(IdError::ZeroId(0)));
    }

    // ── Enumeration oracle ───────────────────────────────────────────────
    //
    // Independent reconstruction of the rank sequence by scanning bits from
    // the top, checked exhaustively against `bit_position` for all ids up
    // to 2^12 (the largest id any acceptance input uses).

    fn oracle_positions(id: Id) -> Vec<u32> {
        (0..=63u32)
            .rev()
            .filter(|&p| id & (1u64 << p) != 0)
            .collect()
    }

    #[test]
    fn matches_enumeration_oracle_exhaustively() {
        for id in 1..=(1u64 << 12) {
            let expected = oracle_positions(id);
            for (i, &pos) in expected.iter().enumerate() {
                assert_eq!(bit_position(i as u32 + 1, id).unwrap(), Some(pos));
            }
            let exhausted_rank = expected.len() as u32 + 1;
            assert_eq!(bit_position(exhausted_rank, id).unwrap(), None);
            assert_eq!(rank_count(id), expected.len() as u32);
        }
    }

    #[test]
    fn positions_strictly_decrease_and_reconstruct_the_id() {
        for id in 1..=4096u64 {
            let mut prev: Option<u32> = None;
            let mut sum = 0u64;
            for rank in 1..=rank_count(id) {
                let pos = bit_position(rank, id).unwrap().unwrap();
                if let Some(q) = prev {
                    assert!(pos < q, "rank positions must strictly decrease");
                }
                assert!(pos <= msb_position(id).unwrap());
                sum += 1u64 << pos;
                prev = Some(pos);
            }
            assert_eq!(sum, id, "sum of 2^Bit(i,id) must reconstruct id");
        }
    }
}
