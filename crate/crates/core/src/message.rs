//! Payloads carried by simulation events.

use crate::broker::QuletResult;
use crate::domain::{QDatacenter, Qulet};
use crate::node::{Completion, NodeJob};

#[derive(Debug, Clone)]
pub struct Submission {
    pub node_id: u32,
    pub job: NodeJob,
}

#[derive(Debug, Clone)]
pub struct NodeDone {
    pub node_id: u32,
    pub completion: Completion,
}

#[derive(Debug, Clone)]
pub enum Payload {
    None,
    ResourceList(Box<QDatacenter>),
    Dispatch(u32),
    Submit(Box<Submission>),
    NodeWake(usize),
    Done(Box<NodeDone>),
    HybridSubmit(Box<Qulet>),
    QuletResult(Box<QuletResult>),
    QuletSkipped(u32),
    TaskDone(u32),
}
