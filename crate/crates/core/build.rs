use std::fmt::Write;
use std::path::Path;

const ASSETS: &[&str] = &[
    "ODD_template.odd",
    "scen_template.odd",
    "env_template.odd",
    "dyn_template.odd",
];

// FNV-1a, 64 bit. Must match `assets::fnv1a64`.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

fn main() {
    let mut out = String::from("pub(crate) const CHECKSUMS: &[(&str, u64)] = &[\n");
    for name in ASSETS {
        let path = Path::new("assets").join(name);
        println!("cargo:rerun-if-changed={}", path.display());
        let bytes = std::fs::read(&path).expect("bundled asset");
        writeln!(out, "    ({name:?}, {:#018x}),", fnv1a64(&bytes)).unwrap();
    }
    out.push_str("];\n");
    let dest = Path::new(&std::env::var("OUT_DIR").unwrap()).join("asset_checksums.rs");
    std::fs::write(dest, out).unwrap();
}
