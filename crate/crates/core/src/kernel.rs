//! Deterministic discrete-event engine.
//!
//! A [`Simulation`] owns a set of entities and an [`EventCalendar`]. Events are
//! delivered in `(time, seq)` order, so simultaneous events arrive in the order
//! they were scheduled. Entities react to events through a [`Context`], which
//! lets them schedule further events and append lines to the [`EventLog`].

use std::any::Any;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

/// Index of an entity inside one simulation instance.
pub type EntityId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("event at t={time} is in the past (clock is {clock})")]
    PastEvent { time: f64, clock: f64 },
    #[error("event time {0} is not a finite non-negative number")]
    InvalidTime(f64),
    #[error("event targets unknown entity #{0}")]
    UnknownDestination(EntityId),
    #[error("no entities registered")]
    NoEntities,
    #[error("{0}")]
    Entity(String),
}

/// Kinds of messages exchanged between simulation entities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventTag {
    Start,
    ResourceListRequest,
    ResourceList,
    StartScheduling,
    Dispatch,
    QuletSubmit,
    NodeWake,
    QuletDone,
    QuletResult,
    QuletSkipped,
    TaskReady,
    TaskDone,
}

#[derive(Debug, Clone)]
pub struct SimEvent<P> {
    pub time: f64,
    pub seq: u64,
    pub source: EntityId,
    pub destination: EntityId,
    pub tag: EventTag,
    pub payload: P,
}

struct Pending<P>(SimEvent<P>);

impl<P> PartialEq for Pending<P> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<P> Eq for Pending<P> {}

impl<P> PartialOrd for Pending<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<P> Ord for Pending<P> {
    // Reversed so that the max-heap pops the earliest (time, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .time
            .total_cmp(&self.0.time)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

/// Priority queue of pending events plus the simulation clock.
pub struct EventCalendar<P> {
    pending: BinaryHeap<Pending<P>>,
    clock: f64,
    next_seq: u64,
}

impl<P> Default for EventCalendar<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> EventCalendar<P> {
    pub fn new() -> Self {
        Self {
            pending: BinaryHeap::new(),
            clock: 0.0,
            next_seq: 0,
        }
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Number of events ever accepted by [`schedule`](Self::schedule).
    pub fn scheduled_count(&self) -> u64 {
        self.next_seq
    }

    /// Enqueues an event and returns the sequence number assigned to it.
    /// The `seq` field of the passed event is overwritten.
    pub fn schedule(&mut self, mut event: SimEvent<P>) -> Result<u64, SimError> {
        if !event.time.is_finite() || event.time < 0.0 {
            return Err(SimError::InvalidTime(event.time));
        }
        if event.time < self.clock {
            return Err(SimError::PastEvent {
                time: event.time,
                clock: self.clock,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        event.seq = seq;
        self.pending.push(Pending(event));
        Ok(seq)
    }

    /// Removes the earliest event and advances the clock to its time.
    pub fn pop(&mut self) -> Option<SimEvent<P>> {
        let Pending(event) = self.pending.pop()?;
        self.clock = event.time;
        Some(event)
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.pending.peek().map(|p| p.0.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LogLevel {
    Events,
    Debug,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogLine {
    pub time: f64,
    pub entity: String,
    pub message: String,
    pub level: LogLevel,
}

impl fmt::Display for LogLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}: {}",
            format_log_time(self.time),
            self.entity,
            self.message
        )
    }
}

/// Renders a timestamp for the event log: `0.0` at the origin, otherwise two
/// decimals rounded half-up.
pub fn format_log_time(time: f64) -> String {
    if time == 0.0 {
        return "0.0".to_string();
    }
    let cents = (time * 100.0).round() as i64;
    format!("{}.{:02}", cents / 100, cents % 100)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    lines: Vec<LogLine>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, line: LogLine) {
        self.lines.push(line);
    }

    pub fn lines(&self) -> &[LogLine] {
        &self.lines
    }

    /// Lines visible at `max_level`, rendered one per entry.
    pub fn render(&self, max_level: LogLevel) -> Vec<String> {
        self.lines
            .iter()
            .filter(|l| l.level <= max_level)
            .map(ToString::to_string)
            .collect()
    }

    pub fn to_text(&self, max_level: LogLevel) -> String {
        let mut out = String::new();
        for line in self.render(max_level) {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Handle given to an entity while it reacts to an event.
pub struct Context<'a, P> {
    self_id: EntityId,
    calendar: &'a mut EventCalendar<P>,
    log: &'a mut EventLog,
    names: &'a [String],
}

impl<P> Context<'_, P> {
    pub fn now(&self) -> f64 {
        self.calendar.clock()
    }

    pub fn id(&self) -> EntityId {
        self.self_id
    }

    pub fn entity_name(&self, id: EntityId) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    /// Schedules an event from this entity to `destination` at absolute `time`.
    pub fn send_at(
        &mut self,
        destination: EntityId,
        time: f64,
        tag: EventTag,
        payload: P,
    ) -> Result<u64, SimError> {
        self.calendar.schedule(SimEvent {
            time,
            seq: 0,
            source: self.self_id,
            destination,
            tag,
            payload,
        })
    }

    pub fn send(
        &mut self,
        destination: EntityId,
        delay: f64,
        tag: EventTag,
        payload: P,
    ) -> Result<u64, SimError> {
        let time = self.now() + delay;
        self.send_at(destination, time, tag, payload)
    }

    pub fn log(&mut self, message: impl Into<String>) {
        self.log_at_level(LogLevel::Events, message);
    }

    pub fn debug(&mut self, message: impl Into<String>) {
        self.log_at_level(LogLevel::Debug, message);
    }

    fn log_at_level(&mut self, level: LogLevel, message: impl Into<String>) {
        let line = LogLine {
            time: self.calendar.clock(),
            entity: self.names[self.self_id].clone(),
            message: message.into(),
            level,
        };
        self.log.push(line);
    }
}

pub trait Entity<P>: Send {
    fn name(&self) -> &str;

    fn handle(&mut self, event: SimEvent<P>, ctx: &mut Context<'_, P>) -> Result<(), SimError>;

    fn as_any(&self) -> &dyn Any;
}

pub struct Simulation<P> {
    entities: Vec<Box<dyn Entity<P>>>,
    names: Vec<String>,
    calendar: EventCalendar<P>,
    log: EventLog,
    delivered: u64,
    delivered_times: Vec<f64>,
    trace_deliveries: bool,
}

impl<P> Default for Simulation<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Simulation<P> {
    pub fn new() -> Self {
        Self {
            entities: Vec::new(),
            names: Vec::new(),
            calendar: EventCalendar::new(),
            log: EventLog::new(),
            delivered: 0,
            delivered_times: Vec::new(),
            trace_deliveries: false,
        }
    }

    pub fn register(&mut self, entity: Box<dyn Entity<P>>) -> EntityId {
        self.names.push(entity.name().to_string());
        self.entities.push(entity);
        self.entities.len() - 1
    }

    /// Id the next registered entity will receive.
    pub fn next_id(&self) -> EntityId {
        self.entities.len()
    }

    pub fn schedule(&mut self, event: SimEvent<P>) -> Result<u64, SimError> {
        self.calendar.schedule(event)
    }

    /// Schedules an event with no meaningful source (the simulation itself).
    pub fn inject(
        &mut self,
        destination: EntityId,
        time: f64,
        tag: EventTag,
        payload: P,
    ) -> Result<u64, SimError> {
        self.calendar.schedule(SimEvent {
            time,
            seq: 0,
            source: destination,
            destination,
            tag,
            payload,
        })
    }

    /// Keep the time of every delivered event (used by causality checks).
    pub fn trace_deliveries(&mut self, on: bool) {
        self.trace_deliveries = on;
    }

    pub fn delivered_times(&self) -> &[f64] {
        &self.delivered_times
    }

    pub fn clock(&self) -> f64 {
        self.calendar.clock()
    }

    pub fn calendar(&self) -> &EventCalendar<P> {
        &self.calendar
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn take_log(&mut self) -> EventLog {
        std::mem::take(&mut self.log)
    }

    pub fn entity(&self, id: EntityId) -> Option<&dyn Entity<P>> {
        self.entities.get(id).map(|e| e.as_ref())
    }

    pub fn entity_as<T: 'static>(&self, id: EntityId) -> Option<&T> {
        self.entities.get(id)?.as_any().downcast_ref::<T>()
    }

    /// Runs until the calendar is empty and returns the final clock.
    pub fn run(&mut self) -> Result<f64, SimError> {
        if self.entities.is_empty() {
            return Err(SimError::NoEntities);
        }
        while let Some(event) = self.calendar.pop() {
            let dest = event.destination;
            let entity = self
                .entities
                .get_mut(dest)
                .ok_or(SimError::UnknownDestination(dest))?;
            self.delivered += 1;
            if self.trace_deliveries {
                self.delivered_times.push(event.time);
            }
            let mut ctx = Context {
                self_id: dest,
                calendar: &mut self.calendar,
                log: &mut self.log,
                names: &self.names,
            };
            entity.handle(event, &mut ctx)?;
        }
        Ok(self.calendar.clock())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Recorder {
        name: String,
        seen: Vec<(f64, u32)>,
    }

    impl Entity<u32> for Recorder {
        fn name(&self) -> &str {
            &self.name
        }

        fn handle(&mut self, event: SimEvent<u32>, _ctx: &mut Context<'_, u32>) -> Result<(), SimError> {
            self.seen.push((event.time, event.payload));
            Ok(())
        }

        fn as_any(&self) -> &dyn Any {
            self
        }
    }

    fn recorder() -> Box<Recorder> {
        Box::new(Recorder {
            name: "rec".into(),
            seen: Vec::new(),
        })
    }

    fn ev(time: f64, dest: EntityId, payload: u32) -> SimEvent<u32> {
        SimEvent {
            time,
            seq: 0,
            source: 0,
            destination: dest,
            tag: EventTag::Start,
            payload,
        }
    }

    #[test]
    fn schedule_on_empty_calendar() {
        let mut cal = EventCalendar::new();
        cal.schedule(ev(0.0, 0, 1)).unwrap();
        assert_eq!(cal.len(), 1);
        assert_eq!(cal.clock(), 0.0);
    }

    #[test]
    fn simultaneous_events_are_fifo() {
        let mut cal = EventCalendar::new();
        cal.schedule(ev(5.0, 0, 1)).unwrap();
        cal.schedule(ev(5.0, 0, 2)).unwrap();
        assert_eq!(cal.pop().unwrap().payload, 1);
        assert_eq!(cal.pop().unwrap().payload, 2);
    }

    #[test]
    fn past_event_rejected() {
        let mut cal = EventCalendar::new();
        cal.schedule(ev(2.0, 0, 1)).unwrap();
        cal.pop();
        assert_eq!(
            cal.schedule(ev(1.0, 0, 2)),
            Err(SimError::PastEvent {
                time: 1.0,
                clock: 2.0
            })
        );
    }

    #[test]
    fn nan_time_rejected() {
        let mut cal = EventCalendar::<u32>::new();
        assert!(matches!(
            cal.schedule(ev(f64::NAN, 0, 1)),
            Err(SimError::InvalidTime(_))
        ));
    }

    #[test]
    fn run_single_event() {
        let mut sim = Simulation::new();
        let id = sim.register(recorder());
        sim.inject(id, 3.5, EventTag::Start, 7).unwrap();
        assert_eq!(sim.run().unwrap(), 3.5);
        assert_eq!(sim.entity_as::<Recorder>(id).unwrap().seen, vec![(3.5, 7)]);
    }

    #[test]
    fn run_empty_calendar() {
        let mut sim = Simulation::<u32>::new();
        sim.register(recorder());
        assert_eq!(sim.run().unwrap(), 0.0);
    }

    #[test]
    fn run_without_entities() {
        let mut sim = Simulation::<u32>::new();
        assert_eq!(sim.run(), Err(SimError::NoEntities));
    }

    #[test]
    fn unknown_destination() {
        let mut sim = Simulation::new();
        sim.register(recorder());
        sim.inject(4, 1.0, EventTag::Start, 0).unwrap();
        assert_eq!(sim.run(), Err(SimError::UnknownDestination(4)));
    }

    #[test]
    fn log_time_rendering() {
        assert_eq!(format_log_time(0.0), "0.0");
        assert_eq!(format_log_time(0.01), "0.01");
        assert_eq!(format_log_time(153.8557), "153.86");
        assert_eq!(format_log_time(0.01 + 100.0 * 4000.0 / 2600.0), "153.86");
        assert_eq!(format_log_time(2.0), "2.00");
    }

    #[test]
    fn log_line_format() {
        let line = LogLine {
            time: 0.01,
            entity: "QBroker".into(),
            message: "Sending Qulet 0 to QNode #0".into(),
            level: LogLevel::Events,
        };
        assert_eq!(line.to_string(), "0.01: QBroker: Sending Qulet 0 to QNode #0");
    }

    struct Chain {
        remaining: u32,
    }

    impl Entity<u32> for Chain {
        fn name(&self) -> &str {
            "chain"
        }

        fn handle(&mut self, event: SimEvent<u32>, ctx: &mut Context<'_, u32>) -> Result<(), SimError> {
            ctx.debug(format!("got {}", event.payload));
            if self.remaining > 0 {
                self.remaining -= 1;
                // Two children: one simultaneous, one delayed.
                ctx.send(ctx.id(), 0.0, EventTag::TaskReady, event.payload + 1)?;
                ctx.send(ctx.id(), 1.25, EventTag::TaskReady, event.payload + 100)?;
            }
            Ok(())
        }

        fn as_any(&self) -> &dyn Any {
            self
        }
    }

    #[test]
    fn causality_and_conservation() {
        let mut sim = Simulation::new();
        let id = sim.register(Box::new(Chain { remaining: 20 }));
        sim.trace_deliveries(true);
        sim.inject(id, 0.5, EventTag::Start, 0).unwrap();
        sim.run().unwrap();
        let times = sim.delivered_times();
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(sim.delivered(), sim.calendar().scheduled_count());
        assert_eq!(sim.delivered(), 41);
    }

    #[test]
    fn context_cannot_schedule_into_past() {
        struct Bad;
        impl Entity<u32> for Bad {
            fn name(&self) -> &str {
                "bad"
            }
            fn handle(&mut self, _e: SimEvent<u32>, ctx: &mut Context<'_, u32>) -> Result<(), SimError> {
                ctx.send_at(0, ctx.now() - 1.0, EventTag::Start, 0).map(|_| ())
            }
            fn as_any(&self) -> &dyn Any {
                self
            }
        }
        let mut sim = Simulation::new();
        sim.register(Box::new(Bad));
        sim.inject(0, 2.0, EventTag::Start, 0).unwrap();
        assert!(matches!(sim.run(), Err(SimError::PastEvent { .. })));
    }
}
