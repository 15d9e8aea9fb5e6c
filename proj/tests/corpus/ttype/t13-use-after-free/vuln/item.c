static int read_item_value(struct queue *q)
{
    struct item *it;
    int v;
    it = q->head;
    release_entry(q);
    v = it->value;
    return v;
}
