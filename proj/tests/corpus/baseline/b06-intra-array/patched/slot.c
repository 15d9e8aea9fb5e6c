static int pick_slot(const int *slots, int idx)
{
    int v;
    if (idx >= SLOT_MAX) {
        return -1;
    }
    v = slots[idx];
    return v;
}
