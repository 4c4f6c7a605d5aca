//! Runtime lookup of groups by name.
//!
//! The CLI and config files select groups by string: `so3`, `se3`, `se2`, or
//! `abelian<n>` with an explicit dimension (e.g. `abelian3`).

use crate::error::{Error, Result};

use super::Group;

/// Registry names of the built-in groups (the abelian family is listed with
/// its conventional 3-dimensional representative).
pub fn builtin_group_names() -> &'static [&'static str] {
    &["so3", "se3", "se2", "abelian<n>"]
}

/// Resolves a registry name to a group descriptor.
pub fn group_by_name(name: &str) -> Result<Group> {
    let lowered = name.trim().to_ascii_lowercase();
    match lowered.as_str() {
        "so3" => Ok(Group::so3()),
        "se3" => Ok(Group::se3()),
        "se2" => Ok(Group::se2()),
        other => {
            if let Some(dim) = other.strip_prefix("abelian") {
                if let Ok(n) = dim.parse::<usize>() {
                    if n >= 1 {
                        return Group::abelian(n);
                    }
                }
            }
            Err(Error::UnknownGroup { name: name.into() })
        }
    }
}
