//! Quantum datacenter entity: hosts node schedulers and reports completions.

use std::any::Any;

use crate::domain::QDatacenter;
use crate::kernel::{Context, Entity, EntityId, EventTag, SimError, SimEvent};
use crate::message::{NodeDone, Payload};
use crate::node::{NodeEvent, NodeScheduler};

pub struct QDatacenterEntity {
    datacenter: QDatacenter,
    nodes: Vec<NodeScheduler>,
    broker: EntityId,
}

impl QDatacenterEntity {
    pub fn new(datacenter: QDatacenter, broker: EntityId) -> Self {
        let nodes = datacenter.nodes.iter().map(NodeScheduler::new).collect();
        Self {
            datacenter,
            nodes,
            broker,
        }
    }

    pub fn datacenter(&self) -> &QDatacenter {
        &self.datacenter
    }

    pub fn schedulers(&self) -> &[NodeScheduler] {
        &self.nodes
    }

    fn report(&self, k: usize, events: Vec<NodeEvent>, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        let node_id = self.datacenter.nodes[k].id;
        for ev in events {
            match ev {
                NodeEvent::Started { qulet_id, mapping, .. } => {
                    ctx.debug(format!(
                        "Qulet {qulet_id} started on QNode #{node_id} with mapping {:?}",
                        mapping.assignment()
                    ));
                }
                NodeEvent::Completed(completion) => {
                    ctx.debug(format!("Qulet {} completed on QNode #{node_id}", completion.qulet_id));
                    ctx.send(
                        self.broker,
                        0.0,
                        EventTag::QuletDone,
                        Payload::Done(Box::new(NodeDone { node_id, completion })),
                    )?;
                }
            }
        }
        Ok(())
    }

    fn schedule_wake(&self, k: usize, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        if let Some(t) = self.nodes[k].next_completion() {
            ctx.send_at(ctx.id(), t.max(ctx.now()), EventTag::NodeWake, Payload::NodeWake(k))?;
        }
        Ok(())
    }
}

impl Entity<Payload> for QDatacenterEntity {
    fn name(&self) -> &str {
        &self.datacenter.name
    }

    fn handle(&mut self, event: SimEvent<Payload>, ctx: &mut Context<'_, Payload>) -> Result<(), SimError> {
        let now = ctx.now();
        match (event.tag, event.payload) {
            (EventTag::ResourceListRequest, _) => {
                ctx.send(
                    event.source,
                    0.0,
                    EventTag::ResourceList,
                    Payload::ResourceList(Box::new(self.datacenter.clone())),
                )?;
            }
            (EventTag::QuletSubmit, Payload::Submit(sub)) => {
                let k = self
                    .datacenter
                    .nodes
                    .iter()
                    .position(|n| n.id == sub.node_id)
                    .ok_or_else(|| SimError::Entity(format!("{}: no node {}", self.datacenter.name, sub.node_id)))?;
                ctx.debug(format!("Qulet {} queued on QNode #{}", sub.job.qulet_id, sub.node_id));
                let events = self.nodes[k]
                    .admit(sub.job, now)
                    .map_err(|e| SimError::Entity(e.to_string()))?;
                self.report(k, events, ctx)?;
                self.schedule_wake(k, ctx)?;
            }
            (EventTag::NodeWake, Payload::NodeWake(k)) => {
                // Wakes scheduled before a later admission may be stale.
                if self.nodes[k].next_completion().is_some_and(|t| t <= now) {
                    let events = self.nodes[k].advance(now);
                    self.report(k, events, ctx)?;
                    self.schedule_wake(k, ctx)?;
                }
            }
            (tag, _) => {
                return Err(SimError::Entity(format!(
                    "{} cannot handle {tag:?}",
                    self.datacenter.name
                )));
            }
        }
        Ok(())
    }

    fn as_any(&self) -> &dyn Any {
        self
    }
}
