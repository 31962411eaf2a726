//! Bundled example quivers, framed graphs and flows.

use crate::io::load_fringed;
use crate::quiver::FringedQuiver;

pub const KRONECKER: &str = include_str!("../fixtures/kronecker.qv");
pub const SHARD: &str = include_str!("../fixtures/shard.qv");
pub const DOUBLE_KRONECKER: &str = include_str!("../fixtures/double-kronecker.qv");
pub const TRIPLE_KRONECKER: &str = include_str!("../fixtures/triple-kronecker.qv");
pub const SINGLE_VERTEX: &str = include_str!("../fixtures/single-vertex.qv");
pub const SINGLETON: &str = include_str!("../fixtures/singleton.qv");
pub const FORBAC: &str = include_str!("../fixtures/forbac.qv");
pub const CUBE_DAG: &str = include_str!("../fixtures/cube.dag");
pub const DIFDAGC_DAG: &str = include_str!("../fixtures/difdagc.dag");

pub const EX52_FLOW: &str = include_str!("../fixtures/ex52.json");
pub const GOTTABEMARKED_FLOW: &str = include_str!("../fixtures/gottabemarked.json");
pub const SINGLETON_FLOW: &str = include_str!("../fixtures/singleton.json");
pub const FORBAC_FLOW: &str = include_str!("../fixtures/forbac.json");
pub const CUBE_FLOW: &str = include_str!("../fixtures/cube.json");

/// A named fixture: a quiver or framed-graph file plus optional flows.
pub struct Fixture {
    pub name: &'static str,
    pub file: &'static str,
    pub is_dag: bool,
    pub flows: &'static [(&'static str, &'static str)],
}

pub const ALL: &[Fixture] = &[
    Fixture { name: "kronecker", file: KRONECKER, is_dag: false, flows: &[("ex52", EX52_FLOW)] },
    Fixture { name: "shard", file: SHARD, is_dag: false, flows: &[("gottabemarked", GOTTABEMARKED_FLOW)] },
    Fixture { name: "double-kronecker", file: DOUBLE_KRONECKER, is_dag: false, flows: &[] },
    Fixture { name: "triple-kronecker", file: TRIPLE_KRONECKER, is_dag: false, flows: &[] },
    Fixture { name: "cube-dag", file: CUBE_DAG, is_dag: true, flows: &[("cube", CUBE_FLOW)] },
    Fixture { name: "difdagc-dag", file: DIFDAGC_DAG, is_dag: true, flows: &[] },
    Fixture { name: "single-vertex", file: SINGLE_VERTEX, is_dag: false, flows: &[] },
    Fixture { name: "singleton", file: SINGLETON, is_dag: false, flows: &[("singleton", SINGLETON_FLOW)] },
    Fixture { name: "forbac", file: FORBAC, is_dag: false, flows: &[("forbac", FORBAC_FLOW)] },
];

pub fn get(name: &str) -> Option<&'static Fixture> {
    ALL.iter().find(|f| f.name == name)
}

fn load(text: &str) -> FringedQuiver {
    load_fringed(text).expect("bundled fixture parses")
}

pub fn kronecker() -> FringedQuiver {
    load(KRONECKER)
}
pub fn shard() -> FringedQuiver {
    load(SHARD)
}
pub fn double_kronecker() -> FringedQuiver {
    load(DOUBLE_KRONECKER)
}
pub fn triple_kronecker() -> FringedQuiver {
    load(TRIPLE_KRONECKER)
}
pub fn single_vertex() -> FringedQuiver {
    load(SINGLE_VERTEX)
}
pub fn singleton() -> FringedQuiver {
    load(SINGLETON)
}
pub fn forbac() -> FringedQuiver {
    load(FORBAC)
}
