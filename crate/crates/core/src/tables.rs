//! Published values of `L/Ω` for small quadratic twists of the two base
//! curves. Each row carries the Cremona label printed beside it; the
//! conductor is stored as prime/exponent pairs.

use crate::curves::Family;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRow {
    pub d: i64,
    pub conductor: &'static [(u64, u32)],
    pub label: &'static str,
    /// `L/Ω`, always an integer in these tables.
    pub ratio: u64,
    /// Primes `p` excluded from the theorem; empty when the ratio vanishes.
    pub excluded: &'static [u64],
    /// The printed cell when it differs from the stored value.
    pub erratum: Option<Erratum>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Erratum {
    pub printed_conductor: &'static str,
    pub note: &'static str,
}

const fn row(
    d: i64,
    conductor: &'static [(u64, u32)],
    label: &'static str,
    ratio: u64,
    excluded: &'static [u64],
) -> TableRow {
    TableRow {
        d,
        conductor,
        label,
        ratio,
        excluded,
        erratum: None,
    }
}

#[rustfmt::skip]
pub const TABLE_15: [TableRow; 23] = [
    row(2,  &[(2, 6), (3, 1), (5, 1)],          "960g3",     2,  &[2, 3, 5]),
    row(3,  &[(2, 4), (3, 2), (5, 1)],          "720h3",     0,  &[]),
    row(6,  &[(2, 6), (3, 2), (5, 1)],          "2880bd3",   4,  &[2, 3, 5]),
    row(7,  &[(2, 4), (3, 1), (5, 1), (7, 2)],  "11760bq3",  0,  &[]),
    row(10, &[(2, 6), (3, 1), (5, 2)],          "4800b3",    0,  &[]),
    row(11, &[(2, 4), (3, 1), (5, 1), (11, 2)], "29040dg3",  0,  &[]),
    row(13, &[(3, 1), (5, 1), (13, 2)],         "2535a3",    0,  &[]),
    row(14, &[(2, 6), (3, 1), (5, 1), (7, 2)],  "47040hg3",  0,  &[]),
    row(17, &[(3, 1), (5, 1), (17, 2)],         "4335d3",    2,  &[2, 3, 5, 17]),
    row(19, &[(2, 4), (3, 1), (5, 1), (19, 2)], "86640cm3",  8,  &[2, 3, 5, 19]),
    row(21, &[(3, 2), (5, 1), (7, 2)],          "2205j3",    4,  &[2, 3, 5, 7]),
    row(22, &[(2, 6), (3, 1), (5, 1), (11, 2)], "116160ez3", 0,  &[]),
    row(23, &[(2, 4), (3, 1), (5, 1), (23, 2)], "126960cj3", 8,  &[2, 3, 5, 23]),
    row(26, &[(2, 6), (3, 1), (5, 1), (13, 2)], "162240ez4", 0,  &[]),
    row(29, &[(3, 1), (5, 1), (29, 2)],         "12615f3",   0,  &[]),
    row(31, &[(2, 4), (3, 1), (5, 1), (31, 2)], "230640bg4", 8,  &[2, 3, 5, 31]),
    row(33, &[(3, 2), (5, 1), (11, 2)],         "5445g3",    0,  &[]),
    row(34, &[(2, 6), (3, 1), (5, 1), (17, 2)], "277440do4", 0,  &[]),
    row(35, &[(2, 4), (3, 1), (5, 2), (7, 2)],  "58800it3",  16, &[2, 3, 5, 7]),
    row(37, &[(3, 1), (5, 1), (37, 2)],         "20535a3",   0,  &[]),
    row(38, &[(2, 6), (3, 1), (5, 1), (19, 2)], "346560gv4", 0,  &[]),
    row(39, &[(2, 4), (3, 2), (5, 1), (13, 2)], "121680en3", 16, &[2, 3, 5, 13]),
    row(41, &[(3, 1), (5, 1), (41, 2)],         "25215h3",   0,  &[]),
];

#[rustfmt::skip]
pub const TABLE_21: [TableRow; 22] = [
    row(2,  &[(2, 6), (3, 1), (7, 1)],          "1344a2",    0, &[]),
    row(3,  &[(2, 4), (3, 2), (7, 1)],          "1008k2",    2, &[2, 3, 7]),
    row(5,  &[(3, 1), (5, 2), (7, 1)],          "525b2",     1, &[2, 3, 5, 7]),
    row(6,  &[(2, 6), (3, 2), (7, 1)],          "4032bm2",   2, &[2, 3, 7]),
    row(10, &[(2, 6), (3, 1), (5, 2), (7, 1)],  "33600dd2",  0, &[]),
    row(11, &[(2, 4), (3, 1), (7, 1), (11, 2)], "40656bk2",  0, &[]),
    row(13, &[(3, 1), (7, 1), (13, 2)],         "3549c2",    0, &[]),
    row(15, &[(2, 4), (3, 2), (5, 2), (7, 1)],  "25200dx2",  0, &[]),
    row(17, &[(3, 1), (7, 1), (17, 2)],         "6069b2",    1, &[2, 3, 7, 17]),
    row(19, &[(2, 4), (3, 1), (7, 1), (19, 2)], "121296dk2", 0, &[]),
    row(22, &[(2, 6), (3, 1), (7, 1), (11, 2)], "162624bj2", 8, &[2, 3, 7, 11]),
    row(23, &[(2, 4), (3, 1), (7, 1), (23, 2)], "177744ca2", 0, &[]),
    row(26, &[(2, 6), (3, 1), (7, 1), (13, 2)], "227136ho2", 4, &[2, 3, 7, 13]),
    row(29, &[(3, 1), (7, 1), (29, 2)],         "17661a2",   0, &[]),
    row(30, &[(2, 6), (3, 2), (5, 2), (7, 1)],  "100800me2", 0, &[]),
    row(31, &[(2, 4), (3, 1), (7, 1), (31, 2)], "322896cn2", 0, &[]),
    row(33, &[(3, 2), (7, 1), (11, 2)],         "7623p2",    2, &[2, 3, 7, 11]),
    row(34, &[(2, 6), (3, 1), (7, 1), (17, 2)], "388416fo2", 0, &[]),
    row(37, &[(3, 1), (7, 1), (37, 2)],         "28749e2",   8, &[2, 3, 7, 37]),
    row(38, &[(2, 6), (3, 1), (7, 1), (19, 2)], "485184dx2", 4, &[2, 3, 7, 19]),
    row(39, &[(2, 4), (3, 2), (7, 1), (13, 2)], "170352t2",  0, &[]),
    // printed as 2^4·3·7·43^2; 41 ≡ 1 (mod 4) leaves 2 unramified, and the
    // printed label has conductor 35301
    TableRow {
        erratum: Some(Erratum {
            printed_conductor: "2^4·3·7·43^2",
            note: "inconsistent with d = 41 and label 35301e2; stored 3·7·41^2",
        }),
        ..row(41, &[(3, 1), (7, 1), (41, 2)], "35301e2", 1, &[2, 3, 7, 41])
    },
];

/// 1 for the `X0(15)` table, 2 for `X0(21)`.
pub fn table_family(which: u8) -> Option<Family> {
    match which {
        1 => Some(Family::X15),
        2 => Some(Family::X21),
        _ => None,
    }
}

pub fn table_rows(family: Family) -> &'static [TableRow] {
    match family {
        Family::X15 => &TABLE_15,
        Family::X21 => &TABLE_21,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Factorization;

    #[test]
    fn labels_match_conductors() {
        for fam in Family::ALL {
            for r in table_rows(fam) {
                let n = Factorization::from_pairs(r.conductor.iter().copied()).value();
                assert!(r.label.starts_with(&n.to_string()), "{fam} d={}", r.d);
            }
        }
    }

    #[test]
    fn zero_rows_have_no_primes() {
        for fam in Family::ALL {
            for r in table_rows(fam) {
                assert_eq!(r.ratio == 0, r.excluded.is_empty());
            }
        }
    }
}
