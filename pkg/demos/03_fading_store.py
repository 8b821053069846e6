"""The digital landfill: a bounded store whose contents fade away.

Semi-volatile semantics — puts evict the least-recently-used entry when
space runs out, reads refresh an entry's lease on life, and anything
untouched for longer than the fade lifetime disappears on its own.
Perfect for caches of things you'd rather not delete but refuse to
keep forever.
"""

from wastekit import DigitalLandfill, LandfillConfig

store = DigitalLandfill(LandfillConfig(capacity_bytes=100, fade_lifetime_epochs=3))


def show(label):
    s = store.stats()
    keys = ", ".join(k.decode() for k in store.live_keys()) or "(empty)"
    print(f"{label:<34} epoch={s.current_epoch} live={s.live_bytes}B  [{keys}]")


print("capacity 100 bytes, fade after 3 idle epochs\n")

store.put(b"thesis-notes", b"x" * 40)
store.put(b"meme-folder", b"x" * 40)
show("put thesis-notes, meme-folder")

# 100 bytes capacity, 80 used: this put must evict the LRU entry
store.put(b"tax-receipts", b"x" * 30)
show("put tax-receipts (evicts LRU)")

for epoch in range(1, 5):
    store.advance_epoch(1)
    if epoch < 4:
        store.get(b"tax-receipts")  # keep touching the receipts
    show(f"epoch +1 (touch receipts: {epoch < 4})")


def probe(key, note):
    hit = store.get(key) is not None
    print(f"get {key.decode():<13} -> {'hit' if hit else 'gone'}  {note}")


print()
probe(b"tax-receipts", "(every read renewed its lease)")
probe(b"thesis-notes", "(idled past the fade lifetime)")
probe(b"meme-folder", "(evicted back at the third put)")

s = store.stats()
print(f"\nlifetime: {s.lifetime_evictions} eviction(s), {s.lifetime_fades} fade(s)")
