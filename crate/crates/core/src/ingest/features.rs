//! User feature encoding for clustering: standardized age, a gender bit, and
//! a one-hot occupation block.

use super::movielens::{UserRecord, NUM_OCCUPATIONS};

/// Encoded feature width: age + gender + occupation one-hot.
pub const FEATURE_DIM: usize = 2 + NUM_OCCUPATIONS;

/// Encode users as rows of `[age_std, gender, occupation one-hot...]`. Age is
/// standardized over the given users (zero when all ages are equal); gender
/// is 1 for male, 0 for female.
pub fn encode_users(users: &[UserRecord]) -> Vec<Vec<f64>> {
    let n = users.len();
    if n == 0 {
        return Vec::new();
    }
    let mean_age = users.iter().map(|u| u.age_code as f64).sum::<f64>() / n as f64;
    let var_age = users
        .iter()
        .map(|u| (u.age_code as f64 - mean_age).powi(2))
        .sum::<f64>()
        / n as f64;
    let std_age = var_age.sqrt();
    users
        .iter()
        .map(|u| {
            let mut row = vec![0.0; FEATURE_DIM];
            row[0] = if std_age > 0.0 {
                (u.age_code as f64 - mean_age) / std_age
            } else {
                0.0
            };
            row[1] = if u.male { 1.0 } else { 0.0 };
            row[2 + u.occupation as usize] = 1.0;
            row
        })
        .collect()
}
