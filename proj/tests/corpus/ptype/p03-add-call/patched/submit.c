static void submit(char *buf, int len)
{
    check_bounds(buf, len);
    enqueue(buf, len);
}
