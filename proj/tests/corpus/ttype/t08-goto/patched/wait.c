static int wait_ready(struct dev *d)
{
    int status;
retry:
    status = dev_status(d);
    if (status < 0) {
        return -1;
    }
    if (status != DEV_READY)
        goto retry;
    return 0;
}
