//! Median coherence times of IBM devices, in microseconds.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub t1: f64,
    pub t2: f64,
}

pub const PRESETS: [Preset; 7] = [
    Preset { name: "boston", t1: 275.27, t2: 338.82 },
    Preset { name: "fez", t1: 142.41, t2: 98.43 },
    Preset { name: "kingston", t1: 261.36, t2: 131.93 },
    Preset { name: "marrakesh", t1: 185.77, t2: 104.16 },
    Preset { name: "pittsburgh", t1: 300.0, t2: 324.17 },
    Preset { name: "torino", t1: 183.67, t2: 131.48 },
    Preset { name: "average", t1: 242.75, t2: 188.165 },
];

pub fn lookup(name: &str) -> anyhow::Result<Preset> {
    PRESETS.iter().copied().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        anyhow::anyhow!("unknown preset '{name}', expected one of: {}", names.join(", "))
    })
}
