typedef void (*notify_fn)(int);

static void fire_event(struct emitter *e, int code)
{
    notify_fn handler;
    handler = e->on_event;
    handler(code);
}
