static void commit_entry(struct journal *j, int nblocks)
{
    int free_slots;
    free_slots = j->slot_limit - j->slot_used;
    if (nblocks > free_slots) {
        return;
    }
    assert(nblocks <= free_slots);
    j->slot_used = j->slot_used + nblocks;
}
