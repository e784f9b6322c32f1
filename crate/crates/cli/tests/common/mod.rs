#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use ordcone::io::{emit_chain, emit_structure, ChainFile};
use ordcone::realization::build_chain;
use ordcone::testkit::fixtures::{bad2, lex2, orth2};
use ordcone::Rational;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ordcone").chain(args.iter().copied());
    let code = ordcone_cli::run(argv, &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

/// Fixture files in a temporary directory.
pub struct Fixtures {
    _dir: tempfile::TempDir,
    pub root: PathBuf,
}

impl Fixtures {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let write = |name: &str, text: &str| fs::write(root.join(name), text).unwrap();
        write("orth2.json", &emit_structure(&orth2().to_candidate()));
        write("lex2.json", &emit_structure(&lex2().to_candidate()));
        write("bad2.json", &emit_structure(&bad2()));
        write("broken.json", "{\"n\": 2, \"sets\": [");
        write("no_e_pos.json", r#"{"n":2,"sets":[{"S":[],"e_pos":[],"e_free":[]},{"S":[1,2],"e_free":[2]}]}"#);

        let one = Rational::from(1);
        let chain = build_chain(&lex2(), 2, &one, &one).unwrap();
        let mut file = ChainFile::from_chain(&chain, None);
        write("lex2_chain.json", &emit_chain(&file));
        file.connecting[0][(1, 0)] = -one.clone();
        write("tampered_chain.json", &emit_chain(&file));
        let mut file = ChainFile::from_chain(&chain, None);
        file.structure = bad2();
        write("bad_structure_chain.json", &emit_chain(&file));
        Fixtures { _dir: dir, root }
    }

    pub fn path(&self, name: &str) -> String {
        self.root.join(name).to_string_lossy().into_owned()
    }

    pub fn read(&self, name: &str) -> String {
        fs::read_to_string(self.root.join(name)).unwrap()
    }

    pub fn exists(&self, name: &str) -> bool {
        Path::new(&self.path(name)).exists()
    }
}
