import pytest

from minionlab.utcp import Connection, ConnectionClosed, FLAG_SQUASH


def make_conn(**kw):
    kw.setdefault("unordered_send", True)
    return Connection(**kw)


def tags(conn):
    return [e.tag for e in conn.send_queue]


class TestPriorityInsertion:
    def test_high_priority_jumps_untransmitted_low(self):
        c = make_conn()
        c.write(b"low", tag=5)
        c.write(b"high", tag=1)
        assert tags(c) == [1, 5]

    def test_never_ahead_of_partially_transmitted(self):
        c = make_conn(mss=10)
        c.write(b"x" * 25, tag=5)  # will transmit 10 of 25
        c.peer_wnd = 10
        segs = c.dequeue_for_transmit(0)
        assert len(segs) == 1 and len(segs[0].payload) == 10
        c.write(b"high", tag=1)
        assert tags(c) == [5, 1]

    def test_stable_fifo_among_equal_tags(self):
        c = make_conn()
        c.write(b"a", tag=3)
        c.write(b"b", tag=3)
        c.write(b"c", tag=3)
        assert [e.data for e in c.send_queue] == [b"a", b"b", b"c"]

    def test_fifo_when_mode_off_tag_ignored(self):
        c = Connection(unordered_send=False)
        c.write(b"low", tag=5)
        c.write(b"high", tag=1)
        assert tags(c) == [5, 1]

    def test_errors(self):
        c = make_conn()
        with pytest.raises(ValueError):
            c.write(b"")
        c.close()
        with pytest.raises(ConnectionClosed):
            c.write(b"x")


class TestSquash:
    def test_squash_discards_same_tag_untransmitted(self):
        c = make_conn()
        c.write(b"old-a", tag=7)
        c.write(b"other", tag=9)
        c.write(b"new-a", flags=FLAG_SQUASH, tag=7)
        assert [(e.tag, e.data) for e in c.send_queue] == [(7, b"new-a"), (9, b"other")]
        assert c.stats.squashed_entries == 1

    def test_squash_spares_transmitted_same_tag(self):
        c = make_conn(mss=10)
        c.write(b"y" * 10, tag=7)
        c.dequeue_for_transmit(0)  # fully transmitted, leaves queue
        c.write(b"z" * 30, tag=7)
        c.peer_wnd = 1 << 20
        segs = c.dequeue_for_transmit(1)
        assert sum(len(s.payload) for s in segs) == 30
        # Partially transmitted same-tag entry must survive a squash.
        c2 = make_conn(mss=10)
        c2.write(b"p" * 25, tag=7)
        c2.peer_wnd = 10
        c2.dequeue_for_transmit(0)
        c2.write(b"q", flags=FLAG_SQUASH, tag=7)
        assert [e.data for e in c2.send_queue] == [b"p" * 25, b"q"]

    def test_squash_only_exact_tag(self):
        c = make_conn()
        c.write(b"a", tag=7)
        c.write(b"b", tag=8)
        c.write(b"c", flags=FLAG_SQUASH, tag=8)
        assert [e.data for e in c.send_queue] == [b"a", b"c"]


class TestDequeue:
    def test_two_full_segments_consecutive_seq(self):
        c = make_conn()
        c.write(b"a" * 1448)
        c.write(b"b" * 1448)
        segs = c.dequeue_for_transmit(0)
        assert [len(s.payload) for s in segs] == [1448, 1448]
        assert segs[1].seq == segs[0].seq + 1448

    def test_no_spanning_across_entries_when_unordered(self):
        c = make_conn()
        c.write(b"a" * 500)
        c.write(b"b" * 2000)
        segs = c.dequeue_for_transmit(0)
        assert [len(s.payload) for s in segs] == [500, 1448, 552]
        assert segs[0].payload == b"a" * 500
        assert segs[1].payload + segs[2].payload == b"b" * 2000

    def test_ordered_mode_packs_across_entries(self):
        c = Connection(unordered_send=False)
        c.write(b"a" * 500)
        c.write(b"b" * 2000)
        segs = c.dequeue_for_transmit(0)
        assert [len(s.payload) for s in segs] == [1448, 1052]

    def test_priority_entry_seq_follows_partial_entry_entirely(self):
        c = make_conn(mss=100)
        c.write(b"L" * 300, tag=5)
        c.peer_wnd = 100
        first = c.dequeue_for_transmit(0)
        assert len(first) == 1
        c.write(b"H" * 50, tag=1)
        c.peer_wnd = 1 << 20
        rest = c.dequeue_for_transmit(1)
        payloads = b"".join(s.payload for s in first + rest)
        assert payloads == b"L" * 300 + b"H" * 50

    def test_empty_when_window_closed(self):
        c = make_conn()
        c.peer_wnd = 0
        c.write(b"data")
        assert c.dequeue_for_transmit(0) == []

    def test_seq_assigned_exactly_once_at_first_transmission(self):
        c = make_conn(mss=10)
        c.write(b"w" * 25)
        entry = c.send_queue[0]
        assert entry.seq_assigned is None
        c.peer_wnd = 10
        c.dequeue_for_transmit(0)
        first = entry.seq_assigned
        assert first is not None
        c.peer_wnd = 1 << 20
        c.dequeue_for_transmit(1)
        assert entry.seq_assigned == first
