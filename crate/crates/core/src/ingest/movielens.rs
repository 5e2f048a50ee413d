//! Parsers for `::`-separated user and rating files (MovieLens-1M layout).
//! Malformed lines are skipped and counted; more than 1% malformed is a hard
//! error.

use crate::error::Error;
use crate::Result;
use std::collections::HashSet;
use std::io::BufRead;

/// Age brackets used by the 1M layout.
pub const AGE_CODES: [u8; 7] = [1, 18, 25, 35, 45, 50, 56];
/// Occupation codes are 0..=20.
pub const NUM_OCCUPATIONS: usize = 21;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRecord {
    pub user_id: u64,
    /// True for 'M', false for 'F'.
    pub male: bool,
    pub age_code: u8,
    pub occupation: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RatingRecord {
    pub user_id: u64,
    pub item_id: u64,
    pub rating: u8,
    pub timestamp: i64,
}

/// Line accounting for one parsed file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub lines: usize,
    pub parsed: usize,
    pub malformed: usize,
}

const MALFORMED_BUDGET: f64 = 0.01;

fn check_budget(stats: ParseStats, what: &str) -> Result<()> {
    if stats.lines > 0 && stats.malformed as f64 > MALFORMED_BUDGET * stats.lines as f64 {
        return Err(Error::parse(format!(
            "{what}: {} of {} lines malformed (over the {}% budget)",
            stats.malformed,
            stats.lines,
            MALFORMED_BUDGET * 100.0
        )));
    }
    Ok(())
}

fn parse_user_line(line: &str) -> Option<UserRecord> {
    let mut parts = line.split("::");
    let user_id: u64 = parts.next()?.parse().ok()?;
    let gender = parts.next()?;
    let male = match gender {
        "M" => true,
        "F" => false,
        _ => return None,
    };
    let age_code: u8 = parts.next()?.parse().ok()?;
    if !AGE_CODES.contains(&age_code) {
        return None;
    }
    let occupation: u8 = parts.next()?.parse().ok()?;
    if occupation as usize >= NUM_OCCUPATIONS {
        return None;
    }
    let _zip = parts.next()?;
    if parts.next().is_some() {
        return None;
    }
    Some(UserRecord { user_id, male, age_code, occupation })
}

fn parse_rating_line(line: &str) -> Option<RatingRecord> {
    let mut parts = line.split("::");
    let user_id: u64 = parts.next()?.parse().ok()?;
    let item_id: u64 = parts.next()?.parse().ok()?;
    let rating: u8 = parts.next()?.parse().ok()?;
    if !(1..=5).contains(&rating) {
        return None;
    }
    let timestamp: i64 = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some(RatingRecord { user_id, item_id, rating, timestamp })
}

fn parse_lines<R: BufRead, T>(
    reader: R,
    what: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<(Vec<T>, ParseStats)> {
    let mut out = Vec::new();
    let mut stats = ParseStats::default();
    for line in reader.lines() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        stats.lines += 1;
        match parse(line) {
            Some(rec) => {
                out.push(rec);
                stats.parsed += 1;
            }
            None => stats.malformed += 1,
        }
    }
    check_budget(stats, what)?;
    Ok((out, stats))
}

/// Parse a `user::gender::age::occupation::zip` file.
pub fn parse_users<R: BufRead>(reader: R) -> Result<(Vec<UserRecord>, ParseStats)> {
    parse_lines(reader, "users", parse_user_line)
}

/// Parse a `user::item::rating::timestamp` file.
pub fn parse_ratings<R: BufRead>(reader: R) -> Result<(Vec<RatingRecord>, ParseStats)> {
    parse_lines(reader, "ratings", parse_rating_line)
}

/// Drop ratings whose user is unknown; returns the surviving ratings and the
/// dropped count.
pub fn drop_orphans(
    ratings: Vec<RatingRecord>,
    users: &[UserRecord],
) -> (Vec<RatingRecord>, usize) {
    let known: HashSet<u64> = users.iter().map(|u| u.user_id).collect();
    let before = ratings.len();
    let kept: Vec<RatingRecord> = ratings
        .into_iter()
        .filter(|r| known.contains(&r.user_id))
        .collect();
    let dropped = before - kept.len();
    (kept, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn parses_well_formed_users() {
        let data = "1::F::1::10::48067\n2::M::56::16::70072\n";
        let (users, stats) = parse_users(Cursor::new(data)).unwrap();
        assert_eq!(stats, ParseStats { lines: 2, parsed: 2, malformed: 0 });
        assert_eq!(
            users[0],
            UserRecord { user_id: 1, male: false, age_code: 1, occupation: 10 }
        );
        assert!(users[1].male);
    }

    #[test]
    fn counts_malformed_users_within_budget() {
        let mut data = String::new();
        for i in 0..200 {
            data.push_str(&format!("{i}::M::25::4::12345\n"));
        }
        data.push_str("bogus line\n");
        let (users, stats) = parse_users(Cursor::new(data)).unwrap();
        assert_eq!(users.len(), 200);
        assert_eq!(stats.malformed, 1);
    }

    #[test]
    fn too_many_malformed_lines_is_an_error() {
        let data = "1::M::25::4::12345\nbroken\n";
        assert!(parse_users(Cursor::new(data)).is_err());
    }

    #[test]
    fn rejects_bad_fields_individually() {
        for bad in [
            "x::M::25::4::12345",    // non-numeric id
            "1::Q::25::4::12345",    // unknown gender
            "1::M::26::4::12345",    // invalid age bracket
            "1::M::25::21::12345",   // occupation out of range
            "1::M::25::4",           // missing zip
            "1::M::25::4::1::extra", // too many fields
        ] {
            assert!(parse_user_line(bad).is_none(), "accepted: {bad}");
        }
    }

    #[test]
    fn parses_ratings_and_validates_range() {
        let data = "1::1193::5::978300760\n1::661::3::978302109\n";
        let (rs, stats) = parse_ratings(Cursor::new(data)).unwrap();
        assert_eq!(stats.parsed, 2);
        assert_eq!(rs[0].rating, 5);
        assert!(parse_rating_line("1::2::6::978300760").is_none());
        assert!(parse_rating_line("1::2::0::978300760").is_none());
    }

    #[test]
    fn empty_input_is_fine() {
        let (rs, stats) = parse_ratings(Cursor::new("")).unwrap();
        assert!(rs.is_empty());
        assert_eq!(stats, ParseStats::default());
    }

    #[test]
    fn orphan_ratings_are_dropped_and_counted() {
        let users = vec![UserRecord { user_id: 1, male: true, age_code: 25, occupation: 0 }];
        let ratings = vec![
            RatingRecord { user_id: 1, item_id: 10, rating: 4, timestamp: 0 },
            RatingRecord { user_id: 9, item_id: 10, rating: 2, timestamp: 0 },
        ];
        let (kept, dropped) = drop_orphans(ratings, &users);
        assert_eq!(kept.len(), 1);
        assert_eq!(dropped, 1);
    }
}
