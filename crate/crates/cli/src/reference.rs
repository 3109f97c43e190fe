//! Historical measurements of the original parallel implementation.
//!
//! These are documentation only: they were taken on machines that no longer
//! exist and are never asserted. Times are assumed to be seconds (the source
//! does not state the unit). Speedups are relative to the SPARC IV
//! workstation.
//!
//! | Computer     | PEs | Time    | Speedup |
//! |--------------|-----|---------|---------|
//! | SPARC IV     | 1   | 139.0 s | 1.0     |
//! | MasPar MP-1  | 128 | 1.1 s   | 126.4   |
//! | NCUBE        | 2   | 48.2 s  | 2.9     |
//! | NCUBE        | 4   | 25.4 s  | 5.5     |
//! | NCUBE        | 8   | 14.4 s  | 9.7     |
//! | NCUBE        | 16  | 11.1 s  | 12.5    |
//! | NCUBE        | 32  | 8.5 s   | 16.4    |

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceEntry {
    pub computer: &'static str,
    pub pes: u32,
    pub seconds: f64,
    pub speedup: f64,
}

impl ReferenceEntry {
    pub fn label(&self) -> String {
        format!("{} / {}", self.computer, self.pes)
    }
}

pub const TABLE1: [ReferenceEntry; 7] = [
    ReferenceEntry {
        computer: "SPARC IV",
        pes: 1,
        seconds: 139.0,
        speedup: 1.0,
    },
    ReferenceEntry {
        computer: "MasPar",
        pes: 128,
        seconds: 1.1,
        speedup: 126.4,
    },
    ReferenceEntry {
        computer: "NCUBE",
        pes: 2,
        seconds: 48.2,
        speedup: 2.9,
    },
    ReferenceEntry {
        computer: "NCUBE",
        pes: 4,
        seconds: 25.4,
        speedup: 5.5,
    },
    ReferenceEntry {
        computer: "NCUBE",
        pes: 8,
        seconds: 14.4,
        speedup: 9.7,
    },
    ReferenceEntry {
        computer: "NCUBE",
        pes: 16,
        seconds: 11.1,
        speedup: 12.5,
    },
    ReferenceEntry {
        computer: "NCUBE",
        pes: 32,
        seconds: 8.5,
        speedup: 16.4,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speedups_agree_with_times_to_one_decimal() {
        let base = TABLE1[0].seconds;
        for e in TABLE1 {
            assert!((base / e.seconds - e.speedup).abs() < 0.06, "{e:?}");
        }
    }
}
