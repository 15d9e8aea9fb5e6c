static void submit(char *buf, int len)
{
    validate(buf);
    enqueue(buf, len);
}
