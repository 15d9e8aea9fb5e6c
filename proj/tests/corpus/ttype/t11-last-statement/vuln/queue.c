static void flush_queue(struct queue *q)
{
    struct item *it;
    it = q->head;
    q->head = 0;
    q->count = 0;
}
