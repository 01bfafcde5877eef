//! Conformance vectors are regenerated and compared with the checked-in
//! fixtures. Set `CDEF_BLESS=1` to rewrite the fixtures.

use std::path::PathBuf;

use cdef_core::vectors::golden_vectors;

#[test]
fn vectors_match_fixtures() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let bless = std::env::var_os("CDEF_BLESS").is_some();
    for (name, contents) in golden_vectors() {
        let path = dir.join(name);
        if bless {
            std::fs::create_dir_all(&dir).unwrap();
            std::fs::write(&path, &contents).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(expected == contents, "{name} differs from fixture");
    }
}

#[test]
fn constraint_fixture_spot_checks() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let text = std::fs::read_to_string(dir.join("constraint.txt")).unwrap();
    let row = text.lines().find(|l| l.starts_with("4 3:")).unwrap();
    let values: Vec<i32> = row[4..].split_whitespace().map(|v| v.parse().unwrap()).collect();
    let at = |d: i32| values[(d + 255) as usize];
    assert_eq!((at(6), at(-6), at(8), at(2), at(0)), (1, -1, 0, 2, 0));
}
